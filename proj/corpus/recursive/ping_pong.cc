def X = p.* -> q; q.* -> p; X
main = X
