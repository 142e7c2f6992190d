"""Exception hierarchy shared by every xolap module."""


class XolapError(Exception):
    """Base class; the CLI maps any subclass to exit status 1."""


class SchemaError(XolapError):
    pass


class XmlSyntaxError(XolapError):
    pass


class ShapeViolation(XolapError):
    """Element nesting does not follow the warehouse grammar."""

    def __init__(self, message, path=None):
        self.path = path
        super().__init__(f"{message} at {path}" if path else message)


class DomainViolation(XolapError):
    def __init__(self, level, value, path=None):
        self.level = level
        self.value = value
        self.path = path
        where = f" at {path}" if path else ""
        super().__init__(f"value {value!r} is outside the domain of level {level!r}{where}")


class UnknownPath(XolapError):
    pass


class UnknownDimension(UnknownPath):
    pass


class UnknownLevel(UnknownPath):
    pass


class UnknownMeasure(UnknownPath):
    pass


class QuerySyntaxError(XolapError):
    pass


class NonReaggregable(XolapError):
    pass


class InvalidRollup(XolapError):
    pass


class NotNormalized(XolapError):
    pass


class InvalidConfig(XolapError):
    pass


class ResultMismatch(XolapError):
    pass
