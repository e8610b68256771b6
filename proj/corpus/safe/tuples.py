point = (3, 4)
x, y = point
print(x, y)
print(point[0] + point[1])
single = (7,)
print(single)
pairs = [(1, "a"), (2, "b")]
for num, letter in pairs:
    print(num, letter)
print(point.count(3))
print(point.index(4))
merged = point + (5,)
print(merged)
a, b, c = [10, 20, 30]
print(a + b + c)
