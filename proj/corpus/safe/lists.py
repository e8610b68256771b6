xs = [3, 1, 2]
xs.append(5)
xs.extend([8, 13])
print(xs)
xs.insert(0, 21)
print(xs.pop())
print(xs)
xs.remove(21)
print(xs)
print(xs.index(2))
print(xs.count(1))
ys = xs.copy()
ys.sort()
print(ys)
ys.reverse()
print(ys)
print(xs + ys)
print([0] * 5)
print(xs[1:3])
total = sum(xs)
print(total)
print(min(xs), max(xs))
