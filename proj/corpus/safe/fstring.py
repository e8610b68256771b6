name = "ada"
count = 3
msg = f"user={name} count={count} next={count + 1}"
print(msg)
nested = f"{name.upper()}!"
print(nested)
braces = f"{{literal}} {count}"
print(braces)
