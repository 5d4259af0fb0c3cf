main = a.v -> b; b.* -> c; c.* -> a; a.* -> d; 0
