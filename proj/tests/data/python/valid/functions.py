def f0(): pass
def f1(a): return a
def f2(a, b=1, *args, c, d=2, **kwargs): pass
def f3(a, /, b, *, c): pass
def f4(a=1, /, b=2, *, c, d=4): pass
def f5(*, a=1, b): pass
def f6(*args: int, **kw: str) -> None: pass
def f7(a: int = 1, b: 'str' = 'x') -> 'Result': pass
def f8(a, b, /): pass
def f9(self, image: "np.ndarray", threshold: float = 0.5, *, invert: bool = False, **options) -> tuple:
    return image, threshold
async def af(x):
    await asyncio.sleep(1)
    async for i in aiter(x):
        yield i
    async with session.get(url) as resp:
        return await resp.json()
    result = [i async for i in agen()]
    result2 = [await z for z in zs]

@decorator
@decorator.attr(1, key=2)
@(lambda f: f)
async def decorated(): ...

class A(B, C, *mixins, metaclass=Meta, **opts):
    x: int = 0
    def method(self, /): return self
