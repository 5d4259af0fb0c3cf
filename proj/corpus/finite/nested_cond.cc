main = if p=q then (p -> q[a]; p -> r[a]; if r=p then (r -> p[x]; 0) else (r -> p[y]; 0)) else (p -> q[b]; p -> r[b]; q.* -> r; 0)
