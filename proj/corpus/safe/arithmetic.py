a = 7
b = 3
print(a + b)
print(a - b)
print(a * b)
print(a // b)
print(a % b)
print(a ** b)
print(a / b)
x = 1 + 3
print(x)
neg = -a + b
print(neg)
big = 2 ** 64
print(big)
