def X = a.* -> b; b.* -> c; c.* -> a; X
main = X
