{*a: 1}
