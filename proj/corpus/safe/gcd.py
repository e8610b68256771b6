import math

def my_gcd(a, b):
    while b != 0:
        a, b = b, a % b
    return a

print(my_gcd(48, 36))
print(math.gcd(48, 36))
print(my_gcd(17, 5))
print(my_gcd(0, 9))
