names = ["ada", "alan", "grace"]
years = [1815, 1912, 1906]
for i, name in enumerate(names):
    print(i, name)
for name, year in zip(names, years):
    print(name, year)
print(list(enumerate(names, 1)))
print(list(zip(names, years)))
