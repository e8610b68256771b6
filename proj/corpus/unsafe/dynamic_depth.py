def inner(x):
    total = 0
    for a in range(2):
        for b in range(2):
            total += x + a + b
    return total

acc = 0
for i in range(2):
    for j in range(2):
        for k in range(2):
            acc += inner(i + j + k)
print(acc)
