def handle(command):
    match command.split():
        case [action]:
            return action
        case [action, obj]:
            return action, obj
        case ["go", direction] if direction in DIRS:
            pass
        case ["drop", *objects]:
            pass
        case [*_]:
            pass
        case Point(x=0, y=0):
            print("Origin")
        case Point(1, y=var) as pt:
            pass
        case {"x": x, "y": y, **rest}:
            pass
        case {}:
            pass
        case (1 | 2 | 3) as small:
            pass
        case -1 | 1.5 | 2j | -3+4j | 5-6j:
            pass
        case "text" | b"bytes" | "con" "cat":
            pass
        case None | True | False:
            pass
        case Color.RED | mod.Color.BLUE:
            pass
        case (a, b, *c):
            pass
        case [a, (b, c)]:
            pass
        case ():
            pass
        case []:
            pass
        case str() | bytes():
            pass
        case x:
            pass
        case _:
            pass

match = 1
match(x)
match[0] = 2
case = 3
_ = match
match x, y:
    case a, b: pass
match *a, b:
    case _: pass
