def X = if s=b then (s -> b[go]; s.item -> b; b.* -> s; X) else (s -> b[end]; 0)
main = b.start -> s; X
