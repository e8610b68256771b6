i = 0
while i < 10 ** 9:
    i += 1
