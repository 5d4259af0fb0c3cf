main = 0
