main = p.x -> q; if q=p then (q -> p[a]; p.* -> q; 0) else (q -> p[b]; q.* -> p; 0)
