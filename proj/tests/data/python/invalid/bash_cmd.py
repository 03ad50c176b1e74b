$ python threshold.py image.png
