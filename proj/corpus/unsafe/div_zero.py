total = 100
count = 0
avg = total / count
print(avg)
