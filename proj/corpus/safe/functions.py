def factorial(n):
    if n <= 1:
        return 1
    return n * factorial(n - 1)

def apply_twice(f, v):
    return f(f(v))

print(factorial(5))
print(factorial(10))
double = lambda v: v * 2
print(apply_twice(double, 3))
print(double(21))
