x = 1_
