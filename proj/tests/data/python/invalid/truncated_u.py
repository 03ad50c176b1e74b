s = '\u12'
