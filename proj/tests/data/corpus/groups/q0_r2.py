from skimage.filters import threshold_otsu


def threshold(image):
    t = threshold_otsu(image)
    mask = image > t
    return mask
