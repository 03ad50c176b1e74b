x = 1 + \