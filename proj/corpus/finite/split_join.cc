main = a.x -> b; if b=c then (b -> c[l]; b -> d[l]; c.* -> d; 0) else (b -> c[r]; b -> d[r]; d.* -> c; 0)
