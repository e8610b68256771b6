x = 1
y = 2.5
name = "value"
z = x
