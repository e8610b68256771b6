payload = "print('own3d')"
code = compile(payload, "<string>", "exec")
