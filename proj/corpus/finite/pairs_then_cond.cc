main = a.one -> b; c.two -> d; if b=a then (b -> a[t]; 0) else (b -> a[f]; 0)
