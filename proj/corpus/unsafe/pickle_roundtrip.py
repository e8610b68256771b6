import pickle
blob = pickle.dumps({"k": 1})
back = pickle.loads(blob)
