main = p.* -> q; p.* -> r; p.* -> s; q.* -> r; 0
