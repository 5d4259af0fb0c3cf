main = if a=b then (a -> b[x]; if c=d then (c -> d[x]; 0) else (c -> d[y]; 0)) else (a -> b[y]; if c=d then (c -> d[x]; 0) else (c -> d[y]; 0))
