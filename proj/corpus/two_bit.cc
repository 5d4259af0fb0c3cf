def X = (a.1 -> b | b.ack0 -> a); (a.0 -> b | b.ack1 -> a); X
main = a.0 -> b; X
