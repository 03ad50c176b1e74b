x = 1__0
