def X = c.req -> s; s.resp -> c; X
main = c.hello -> s; X
