def X = p.* -> q; if q=r then (q -> p[a]; q -> r[a]; X) else (q -> p[b]; q -> r[b]; r.* -> p; 0)
main = X
