main = p -> q[go]; q.* -> p; p -> q[stop]; 0
