x = "x" < 3
print(x)
