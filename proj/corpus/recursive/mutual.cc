def X = p.* -> q; Y
def Y = q.* -> r; X
main = X
