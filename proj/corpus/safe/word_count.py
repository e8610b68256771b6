text = "the quick brown fox jumps over the lazy dog the fox"
counts = {}
for word in text.split():
    counts[word] = counts.get(word, 0) + 1
print(counts["the"])
print(counts["fox"])
print(sorted(counts.keys()))
total = sum(counts.values())
print(total)
