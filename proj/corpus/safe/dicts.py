ages = {"ada": 36, "alan": 41}
ages["grace"] = 85
print(ages)
print(ages["ada"])
print(ages.get("none", 0))
print(sorted(ages.keys()))
print(sorted(ages.values()))
for k in ages:
    print(k, ages[k])
ages.update({"alan": 42})
print(ages["alan"])
print(ages.setdefault("ada", 1))
print(ages.pop("grace"))
print(len(ages))
print("ada" in ages)
items = ages.items()
print(items)
