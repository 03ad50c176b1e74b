def a():
    def b():
        def c():
            if x:
                for i in y:
                    while z:
                        try:
                            with w:
                                return [[[i]]]
                        except E:
                            pass
        return c
    return b
