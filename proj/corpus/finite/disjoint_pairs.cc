main = p.x -> q; r.y -> s; 0
