class Backdoor:
    def run(self):
        return 1
