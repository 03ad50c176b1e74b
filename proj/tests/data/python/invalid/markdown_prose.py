Here is the code:
x = 1
