i = 0
while i < 100:
    i += 1
