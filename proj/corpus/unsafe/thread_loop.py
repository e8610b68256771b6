import threading
while True:
    threading.Thread(target=task).start()
