def X = p.* -> q; if q=p then (q -> p[again]; X) else (q -> p[done]; 0)
main = X
