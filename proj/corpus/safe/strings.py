s = "Hello, World"
print(s.upper())
print(s.lower())
print(s.replace("World", "there"))
parts = s.split(", ")
print(parts)
print("-".join(parts))
print(s.find("World"))
print(s.count("l"))
print("  padded  ".strip())
print(s.startswith("Hello"))
print(s.endswith("!"))
print("abc123".isalnum())
print("abc".isalpha())
print("123".isdigit())
print(len(s))
print(s[0])
print(s[-1])
print(s[7:12])
print(s[::-1])
