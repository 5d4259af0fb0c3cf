def X = if p=q then (p -> q[more]; p.* -> q; X) else (p -> q[stop]; 0)
main = X
