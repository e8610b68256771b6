f = open("../../etc/passwd", "r")
print(f.read())
