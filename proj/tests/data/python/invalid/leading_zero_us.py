x = 0_7
