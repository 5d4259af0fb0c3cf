main = p.1 -> q; p.2 -> q; p.3 -> q; q.* -> p; 0
