*a += 1
