x = 1
kind = x.__class__.__name__
print(kind)
