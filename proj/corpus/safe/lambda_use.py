square = lambda v: v * v
print(square(9))
print(isinstance(3, int))
print(isinstance(3.5, (int, float)))
print(isinstance(True, int))
print(isinstance("s", int))
print(abs(-7))
print(min(4, 2, 9))
print(max([5, 1, 8]))
print(sum([1, 2, 3], 10))
