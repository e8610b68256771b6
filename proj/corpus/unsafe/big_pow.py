x = 10 ** 100000
y = x ** 100
print(y)
