// client authentication
def X = c.pwd -> a; if a=s then (a -> c[ok]; a -> s[ok]; s.t -> c; 0) else (a -> c[ko]; a -> s[ko]; X)
main = X
