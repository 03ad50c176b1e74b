s = '\x4'
