s = {1, 2, 3}
s.add(4)
print(sorted(s))
print(2 in s)
print(9 in s)
t = s.union({5, 6})
print(sorted(t))
overlap = t.intersection({2, 4, 6})
print(sorted(overlap))
rest = t.difference({1, 2})
print(sorted(rest))
dedup = set([1, 1, 2, 3, 3])
print(len(dedup))
s.discard(1)
print(sorted(s))
