main = p -> q[l1]; p -> r[l1]; q.a -> r; r.b -> p; 0
