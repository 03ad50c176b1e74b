#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Image segmentation using thresholding.
"""
import argparse
import logging
from pathlib import Path

import cv2
import numpy as np

logger = logging.getLogger(__name__)

THRESH_METHODS = {
    "binary": cv2.THRESH_BINARY,
    "binary_inv": cv2.THRESH_BINARY_INV,
    "otsu": cv2.THRESH_BINARY + cv2.THRESH_OTSU,
}


def load_gray(path: Path) -> np.ndarray:
    img = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
    if img is None:
        raise FileNotFoundError(path)
    if img.ndim == 3:
        img = cv2.cvtColor(img, cv2.COLOR_BGR2GRAY)
    return img


def segment(image, method="otsu", value=0, blur_ksize=None):
    """Segment `image` and return (threshold, mask)."""
    if not isinstance(image, np.ndarray) or image.ndim != 2:
        raise ValueError("expected a 2D gray value image, got %r" % (type(image),))
    if image.dtype != np.uint8:
        image = cv2.normalize(image, None, 0, 255, cv2.NORM_MINMAX).astype("uint8")
    if blur_ksize:
        image = cv2.GaussianBlur(image, (blur_ksize, blur_ksize), 0)
    t, mask = cv2.threshold(image, value, 255, THRESH_METHODS[method])
    logger.debug("threshold=%s nonzero=%d", t, np.count_nonzero(mask))
    return t, mask


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("input", type=Path)
    parser.add_argument("-o", "--output", type=Path, default=Path("mask.png"))
    parser.add_argument("--method", choices=sorted(THRESH_METHODS), default="otsu")
    args = parser.parse_args(argv)
    try:
        t, mask = segment(load_gray(args.input), args.method)
    except (FileNotFoundError, ValueError) as exc:
        parser.error(str(exc))
    else:
        cv2.imwrite(str(args.output), mask)
        print(f"Otsu threshold: {t:.1f}; wrote {args.output}")
    return 0


if __name__ == '__main__':
    raise SystemExit(main())
