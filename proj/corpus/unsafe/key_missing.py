config = {"host": "localhost"}
port = config["port"]
print(port)
