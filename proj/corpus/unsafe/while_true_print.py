while True: print("Running forever")
