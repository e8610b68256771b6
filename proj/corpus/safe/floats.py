pi_ish = 3.14159
r = 2.0
area = pi_ish * r ** 2
print(area)
half = 1 / 2
print(half)
print(7.5 // 2.0)
print(7.5 % 2.0)
print(round(2.675, 2))
print(round(2.5))
print(round(3.5))
print(0.1 + 0.2)
scaled = 1.5e3
print(scaled)
tiny = 2.5e-4
print(tiny)
