import string
print(string.digits)
print(string.ascii_lowercase)
vowels = "aeiou"
consonants = [c for c in string.ascii_lowercase if c not in vowels]
print(len(consonants))
print(consonants[:5])
