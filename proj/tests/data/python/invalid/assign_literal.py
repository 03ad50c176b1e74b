1 = a
