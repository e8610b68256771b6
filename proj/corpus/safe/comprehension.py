squares = [i * i for i in range(6)]
print(squares)
evens = [n for n in range(10) if n % 2 == 0]
print(evens)
table = {n: n ** 3 for n in range(4)}
print(table)
shouting = [w.upper() for w in ["ab", "cd"]]
print(shouting)
filtered = {k: v for k, v in [(1, 2), (3, 4)] if k > 1}
print(filtered)
