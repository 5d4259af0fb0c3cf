main = p.x -> q; 0
