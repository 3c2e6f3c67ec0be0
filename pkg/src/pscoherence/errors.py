class ValidationError(ValueError):
    """Invalid input, tagged with the dotted path of the offending field."""

    def __init__(self, message, field=None):
        self.field = field
        self.message = message
        super().__init__(f"{field}: {message}" if field else message)


class SimulationWarning(UserWarning):
    pass
