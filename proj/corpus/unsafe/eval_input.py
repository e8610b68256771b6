expr = "2 + 2"
result = eval(expr)
print(result)
