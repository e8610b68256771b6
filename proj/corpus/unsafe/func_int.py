def func(s):
    return s.upper()

result = func(1234)
