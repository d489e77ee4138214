from typing import List


class ConfigError(ValueError):
    """ Invalid run configuration, fields holds one "field: problem" entry per violation """

    def __init__(self, fields: List[str]):
        self.fields = list(fields)
        super().__init__("Invalid run config: " + "; ".join(self.fields))
