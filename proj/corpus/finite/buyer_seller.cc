main = b.title -> s; s.price -> b; if b=s then (b -> s[accept]; b.addr -> s; s.date -> b; 0) else (b -> s[reject]; 0)
