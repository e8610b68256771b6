limit = 40
primes = []
for candidate in range(2, limit):
    divisible = False
    for p in primes:
        if candidate % p == 0:
            divisible = True
            break
    if not divisible:
        primes.append(candidate)
print(primes)
print(len(primes))
