lst = []
while len(lst) < 10 ** 12:
    lst.append("data")
