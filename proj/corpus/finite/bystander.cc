main = if p=q then (p -> q[l]; r.x -> s; 0) else (p -> q[m]; r.x -> s; 0)
