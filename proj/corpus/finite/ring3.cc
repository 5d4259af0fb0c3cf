main = p.x -> q; q.y -> r; r.z -> p; 0
