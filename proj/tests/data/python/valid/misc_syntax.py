x = [
    1,
    2,  # trailing comment
]
y = {
    'a': 1,
}
z = f(
    a,
    b,
)
if a and \
   b:
    pass
class K(): pass
def g(a, b,): pass
def h(*a,): pass
def k(**kw,): pass
lambda a,: a
print(*args, sep='', end='\n', file=sys.stderr)
print()
result = obj.method(
    arg1, arg2
).chain()[0]
value = (yield)
items = sorted(data, key=lambda item: (item[1], -item[0]), reverse=True)
matrix = [[0] * n for _ in range(m)]
s = a if (b := c) else d
n = not not x
t = a, 
v = *a, *b
w = [*a, *b]
q = {**a}
r = x[1:-1, ::2, ...]
img[img > 127] = 255
img[mask == 0] = [0, 0, 0]
arr[:, :, ::-1]
a = b = c
x = 'a' 'b'
if x:
	pass
def tabbed():
	return 1
type = 5
print(type)
