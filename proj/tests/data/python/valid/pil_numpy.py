from PIL import Image
import numpy as np

def threshold(img, t=128):
    arr = np.asarray(img.convert('L'), dtype=np.float32)
    out = np.where(arr > t, 255, 0).astype(np.uint8)
    return Image.fromarray(out)

def manual_otsu(hist):
    total = hist.sum()
    sum_total = np.dot(np.arange(256), hist)
    w_b, sum_b, best, level = 0.0, 0.0, -1.0, 0
    for i in range(256):
        w_b += hist[i]
        if w_b == 0:
            continue
        w_f = total - w_b
        if w_f == 0:
            break
        sum_b += i * hist[i]
        m_b = sum_b / w_b
        m_f = (sum_total - sum_b) / w_f
        between = w_b * w_f * (m_b - m_f) ** 2
        if between > best:
            best, level = between, i
    else:
        pass
    return level
