def fib(n):
    a = 0
    b = 1
    for _ in range(n):
        a, b = b, a + b
    return a

for i in range(10):
    print(fib(i))
print(fib(40))
