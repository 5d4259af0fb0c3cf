main = p.x -> q; if q=r then (q -> r[l]; q -> s[l]; r.y -> s; 0) else (q -> r[m]; q -> s[m]; s.z -> r; 0)
