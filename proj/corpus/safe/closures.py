def make_adder(n):
    return lambda x: x + n

add5 = make_adder(5)
add100 = make_adder(100)
print(add5(10))
print(add100(10))
print(add5(add100(1)))
