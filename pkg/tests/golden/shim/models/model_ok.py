class TopModule:
    def __init__(self):
        self.count = 0

    def eval(self, inputs):
        if inputs.get("rst", 0):
            self.count = 0
        elif inputs.get("en", 0):
            self.count = (self.count + 1) & 0xFF
        return {"q": self.count}
