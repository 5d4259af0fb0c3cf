main = if p=q then (p -> q[l]; q.* -> p; 0) else (p -> q[r]; 0)
