data = [5, 3, 8, 1, 9, 2]
print(sorted(data))
data.sort()
print(data)
words = ["pear", "apple", "fig"]
print(sorted(words))
mixed = [2.5, 1, 3.75, 2]
print(sorted(mixed))
nested = [[2, 1], [1, 9], [1, 2]]
print(sorted(nested))
