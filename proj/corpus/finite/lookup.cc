main = c.req -> s; if s=db then (s -> c[ok]; s.data -> c; 0) else (s -> c[ko]; 0)
