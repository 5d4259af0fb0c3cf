def X = if p=q then (p -> q[l]; p -> r[l]; r.* -> q; X) else (p -> q[r]; p -> r[r]; 0)
main = X
