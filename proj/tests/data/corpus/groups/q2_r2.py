import cv2

image = cv2.imread("input.png", 0)
_, mask = cv2.threshold(image, 127, 255, cv2.THRESH_BINARY)
cv2.imwrite("mask.png", mask)
