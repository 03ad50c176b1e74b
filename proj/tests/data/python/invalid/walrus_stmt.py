x := 1
