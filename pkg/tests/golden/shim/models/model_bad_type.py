class TopModule:
    def eval(self, inputs):
        return {"q": "seven"}
