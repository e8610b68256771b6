confirmation = book_flight("SFO", "JFK", "2026-09-01")
print(confirmation)
