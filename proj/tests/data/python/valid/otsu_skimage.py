from skimage import io, filters
from skimage.color import rgb2gray
import numpy as np
import matplotlib.pyplot as plt

def segment_otsu(image: np.ndarray) -> np.ndarray:
    if not isinstance(image, np.ndarray) or image.ndim != 2:
        raise TypeError("Input must be a 2D grayscale numpy array")
    thresh = filters.threshold_otsu(image)
    return image > thresh

img = rgb2gray(io.imread('cells.png')[..., :3])
mask = segment_otsu(img)
fig, axes = plt.subplots(1, 2, figsize=(10, 5))
axes[0].imshow(img, cmap='gray'); axes[0].set_title('Original')
axes[1].imshow(mask, cmap='gray')
axes[1].set_title('Otsu')
for ax in axes:
    ax.axis('off')
plt.tight_layout()
plt.show()
