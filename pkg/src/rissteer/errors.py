"""Exception hierarchy shared by the library and the CLI."""


class RisError(Exception):
    """Base class for all errors raised by rissteer."""


class InvalidArgument(RisError, ValueError):
    pass


class OutOfBand(RisError, ValueError):
    """Requested frequency lies outside a state's sampled range."""


class TooLargeInstance(RisError, ValueError):
    """Exhaustive enumeration would exceed the hard candidate cap."""


class ScenarioParseError(RisError):
    def __init__(self, message, path=None, line=None, column=None):
        self.path = path
        self.line = line
        self.column = column
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}:{column if column is not None else 0}"
            where += ": "
        super().__init__(where + message)


class ScenarioValidationError(RisError):
    def __init__(self, field, constraint):
        self.field = field
        self.constraint = constraint
        super().__init__(f"{field}: {constraint}")
