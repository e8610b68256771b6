import math
print(math.sqrt(16.0))
print(math.floor(3.7))
print(math.ceil(3.2))
print(math.fabs(-2.5))
print(round(math.pi, 4))
print(math.pow(2.0, 10.0))
print(math.factorial(6))
print(math.gcd(12, 18))
