import threading
lock1 = threading.Lock()
lock2 = threading.Lock()
lock1.acquire(); lock2.acquire()
