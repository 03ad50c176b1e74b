#!/usr/bin/env python3
"""Differential check of the C++ parser against CPython's `ast` module.

    differential.py TREE_DUMP_BINARY [--seed N] [--mutants N] [SNIPPET_FILES...]

Runs hand-written edge cases plus random character-level mutants of the
valid corpus through both parsers. Agreement means both reject, or both
accept with identical serialized trees. Needs the same CPython minor version
the goldens were frozen with (3.10).
"""
import argparse
import pathlib
import random
import subprocess
import sys
import tempfile

sys.path.insert(0, str(pathlib.Path(__file__).parent))
import ast  # noqa: E402
from py_ast_trees import serialize  # noqa: E402

ROOT = pathlib.Path(__file__).resolve().parents[1] / "data" / "python"

# Named escapes need the Unicode name database, which the C++ side does not
# carry; the escape text is kept verbatim there instead.
KNOWN_DEVIATIONS = ["x = '\\N{BULLET}x'", "x = '\\N{EM DASH}'"]

EDGE_CASES = [
    "*a = 1", "x = *a", "1if x else 2", "0in x", "1abc", "f(a=1, a=2)", "U'x'", "u'a' f'{x}'",
    "f'{x for x in y}'", "f'\\{x}'", "a[x:=1]", "f'{a!r }'", "x = 0_0", "f'{x:{y:{z}}}'",
    "class A(x for x in y): pass", "(a) += 1", "(a, b) += 1", "[a] = 1", "a, = 1", "del (a), [b]",
    "del ()", "with (a, b) as c: pass", "with (a as b, c): pass", "lambda: (yield)", "f'{3!r:}'",
    "f'{x=}'", "f'{x = !s:>10}'", "f(**a, b=1, *c)", "x: int = yield", "a[1:2, 3]", "a[()]",
    "match x:\n case 1: pass", "match = 1", "match(x)", "-1**2", "x = 1_0.0_1e1_0", "0xFF_FF",
    "0b_1", "0_7", "00", "1__0", "b'\\u1234'", "'\\777'", "b'\\777'", "x = 1.", "x = .5j",
    "09.5", "09", "0e0", "1_000j", "f'{x!r=}'", "1.__class__", "1jx", "1_", "0x", "1e", "1e+",
    "0b2", "0o8", "0b1a", "1.5j.real", "1 .real", "x = 5else", "1else 2", "0x1for",
    "a = 1\n\tb", "if x:\n\tb\n        c", "if x:\n        b\n\tc", "'''a\r\nb'''", "x = '\\\r\n'",
    "$", "a ! b", "a <> b", "f'{{}}'", "f'}}{{'", "f'{a[\"x\"]}'", "f'{x:{y}d}'", "f'{x:}}'",
    "f'{x:{{}}}'", "x = yield = 1", "def f(a=1, /, b): pass", "def f(*, a=1, b): pass",
    "def f(a, *, **k): pass", "from .... import x", "try:\n pass\nexcept* E:\n pass",
    "a[b, *c]", "x = {i: j async for i, j in y}", "{x := 1: 2}", "f'{x:=1}'", "f'{(x:=1)}'",
    "x = 1e400", "x = 1e-400", "x = 123456789012345678901234567890", "x = 0x" + "f" * 40,
    "x = 1.5e16", "x = 1e16", "x = 1e15", "x = 0.0001", "x = 0.00001", "x = 2j", "x = 1.5e-7j",
    "x = '\\x00\\x7f\\x80\\xff'", "x = 'a\"b'", "x = \"a'b\"", "x = 'a\\'b\"'", "x = '\\u00e9\\u0301'",
    "x = b'\\x00\\'\"'", "x = r'\\N{BULLET}'", "f'{x!a}'", "f'{x!z}'",
    "f'{}'", "f'{ }'", "f'{#}'", "f'{x:#x}'", "f'{x:{\"a\"}}'", "f'''{\n x\n}'''",
    "match x:\n case [1, *rest]: pass\n case {'a': 1, **kw}: pass\n case P(x, y=2): pass\n",
    "match x:\n case -1 + 2j | 3 - 4j: pass", "match x:\n case 1 + 2: pass",
    "match x:\n case a.b.c: pass\n case _: pass", "match x, y:\n case (a, b) as c if a: pass",
    "match x:\n case None | True | False: pass", "match x:\n case {}: pass\n case (): pass\n case []: pass",
    "match x:\n case *a, b: pass", "match x:\n case f'{x}': pass", "match x:\n case a as _: pass",
    "match x:\n case P(a=1, b): pass", "match *a, b:\n case _: pass", "match x:\n  case {a: 1}: pass",
    "print(match)", "match.x = 1", "case = 1", "_ = 1", "x = [*a]", "x = {**a, 'b': 1, **c}",
    "global x,", "import a as b.c", "from x import *, y", "from x import (a as b)",
    "async def f():\n async with a: pass\n return [x async for x in y]", "await = 1",
    "def f[T](): pass", "x = (yield from y)", "lambda x=1, *y, z, **w: 0", "lambda *, x: 0",
    "lambda x, /: 0", "lambda /: 0", "@a.b\n@c()\n@d[e]\ndef f(): pass", "@(yield)\ndef f(): pass",
    "if x:\npass", "if x:\n  pass\n else:\n  pass", "while 1:\n  break\nelse:\n  continue",
    "x = a if b", "x = not", "x = a not b", "a is not not b", "x = ~~a", "x = a @ b @ c",
    "x = a ** b ** c", "x = a // b % c * d / e", "x = a << b >> c", "x = a & b ^ c | d",
    "x = (a, b)[::2]", "x = a[:, 1]", "x = a[1:]", "x = a[:]", "x = a[::]", "x = a[...]",
    "x = a[b:c:d, e:f]", "del a[1], b.c", "del *a", "del a + b", "for *a in b: pass",
    "for a.b, c[d] in e: pass", "for f() in x: pass", "with a as (b, c): pass", "with a as b.c: pass",
    "with a as f(): pass", "x = [i for i in a for j in b if c if d]", "x = (i async for i in a)",
    "f(x for x in y)(1)", "f(*a, *b, **c, **d)", "f(a, *b, c=1, *d, e=2, **f)", "f(a)(b)(c)",
    "x = {1, 2, *a}", "x = {}", "x = {1: 2,}", "x = [1, 2,]", "x = (1,)", "x = ()", "x = (1)",
    "assert (x, 'msg')", "raise", "raise from x", "return", "x = 'a' b'b'", "x = f'a' b'b'",
    "x = 'a' f'{b}' 'c' f'd{e!r:{f}}g'", "x = u'a' 'b'", "x = 'a' u'b'", "x = rf'\\{a}'",
    "x = fr'\\n{a}\\n'", "x = f'\\n{a}\\t'", "x = f'{a}' f'' f'{b}'", "def f(a, a): pass",
    "nonlocal x", "x = 1; y = 2;", "x = 1;; y = 2", ";", "x = 1 \\\n + 2", "x = (1 +\n 2)",
    "# only a comment", "\n\n\n", "   \n", "x = 1  # trailing", "if x:\n  # c\n  pass\n# c\n",
    "if True:\n    x = 1\n  y = 2", "\tx = 1", "x = 1\n  ", "def f():\n    '''doc'''\n    return 1",
    "class A:\n  def f(self): ...\n  x: int", "x = \"\"\"a\nb\\\nc\"\"\"", "x = '\\q'", "x = b'\\q'",
    "try:\n  pass\nelse:\n  pass", "try:\n  pass\nexcept E as e:\n  pass\nelse:\n  pass\nfinally:\n  pass",
    "x = ((((((((((1))))))))))", "x = [[[[[[1]]]]]]", "x = -(-(-(1)))", "print(f'{x!r:>{width}.{prec}}')",
    "x = 0o", "x = 0b", "x = 1e5j", "x = 0j", "x = 00.5", "x = 0_0.5", "x = 1_2_3", "x = 1.2_3e4_5",
    "x = .5", "x = 5.", "x = 5.j", "x = 1E+5", "a.__b__ = c", "x = a.b.c.d", "x = a().b[c](d)",
    "x = 'é'", "é = 1", "x = 'tab\\there'", "x = '\\a\\b\\f\\v\\0'", "x = '\\U0001F600'",
    "x = '\\U00110000'", "x = '\\xg0'", "x = '\\u12'", "x = ''''a'''", "x = '''a''''",
    "x = \"\"\"'\"\"\"", "x = 'a' \\\n 'b'", "if x: pass\nelif y: pass", "for x in y: pass\nelse: pass",
]


def cpython(src: bytes):
    try:
        return serialize(ast.parse(src))
    except (SyntaxError, ValueError):
        return None
    except RecursionError:
        return "RECURSION"


def mutate(rng, text):
    ops = ["delete", "duplicate", "swap", "insert", "dropline", "dupline"]
    op = rng.choice(ops)
    if not text:
        return text
    i = rng.randrange(len(text))
    if op == "delete":
        return text[:i] + text[i + 1:]
    if op == "duplicate":
        return text[:i] + text[i] + text[i:]
    if op == "swap" and i + 1 < len(text):
        return text[:i] + text[i + 1] + text[i] + text[i + 2:]
    if op == "insert":
        return text[:i] + rng.choice("()[]{}:,.=+-*'\"\\#@ \n\t_axf0123jeE") + text[i:]
    lines = text.split("\n")
    k = rng.randrange(len(lines))
    if op == "dropline":
        del lines[k]
    else:
        lines.insert(k, lines[k])
    return "\n".join(lines)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("binary")
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--mutants", type=int, default=3000)
    ap.add_argument("extra", nargs="*")
    args = ap.parse_args()

    rng = random.Random(args.seed)
    corpus = [p.read_text(encoding="utf-8") for p in sorted((ROOT / "valid").glob("*.py")) if p.name != "bom.py"]
    cases = [c.encode() for c in EDGE_CASES + KNOWN_DEVIATIONS]
    cases += [pathlib.Path(p).read_bytes() for p in args.extra]
    for _ in range(args.mutants):
        text = rng.choice(corpus)
        for _ in range(rng.randint(1, 3)):
            text = mutate(rng, text)
        cases.append(text.encode())

    mismatches = 0
    with tempfile.TemporaryDirectory() as tmp:
        paths = []
        for k, c in enumerate(cases):
            p = pathlib.Path(tmp) / f"c{k}.py"
            p.write_bytes(c)
            paths.append(str(p))
        out = []
        for start in range(0, len(paths), 500):
            res = subprocess.run([args.binary, *paths[start:start + 500]], capture_output=True, check=True)
            out += res.stdout.decode("utf-8").split("\n")[:-1]
    for src, got in zip(cases, out):
        want = cpython(src)
        if src.decode("utf-8", "replace") in KNOWN_DEVIATIONS:
            continue
        ok = (want is None and got.startswith("ERROR")) or want == got
        if not ok:
            mismatches += 1
            if mismatches <= 25:
                print("MISMATCH", repr(src.decode("utf-8", "replace"))[:300])
                print("  cpython:", (want or "ERROR")[:300])
                print("  ours:   ", got[:300])
    print(f"{len(cases)} cases, {mismatches} mismatches")
    return 1 if mismatches else 0


if __name__ == "__main__":
    sys.exit(main())
