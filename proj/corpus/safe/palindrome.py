def is_palindrome(s):
    cleaned = s.lower().replace(" ", "")
    return cleaned == cleaned[::-1]

print(is_palindrome("racecar"))
print(is_palindrome("Never odd or even"))
print(is_palindrome("hello"))
