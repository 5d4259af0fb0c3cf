def X = p.* -> q; r.* -> s; X
main = X
