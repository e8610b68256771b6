f = open("file.txt", "r")
