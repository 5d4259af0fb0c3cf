main = if p=q then (p -> q[l]; 0) else (p -> q[r]; 0)
