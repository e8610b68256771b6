lst = []
while True:
    lst.append("data")
