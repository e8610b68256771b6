handle = open("dump.txt", "w")
handle.write("exfil")
