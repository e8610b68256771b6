status = flaky_service("payload")
print(status)
