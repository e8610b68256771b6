def grade(score):
    if score >= 90:
        return "A"
    elif score >= 80:
        return "B"
    elif score >= 70:
        return "C"
    else:
        return "F"

for s in [95, 85, 71, 40]:
    print(grade(s))
flag = 1 < 2 <= 3
print(flag)
print(True and not False)
print(0 or "fallback")
value = None
print(value == None)
print(not value)
