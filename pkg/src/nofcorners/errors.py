"""Exception types raised across the package."""


class NOFError(Exception):
    pass


class InvalidSizeError(NOFError, ValueError):
    """No admissible (q, d) pair exists for the requested N."""


class RangeError(NOFError, ValueError):
    pass


class MalformedVectorError(NOFError, ValueError):
    pass


class ShapeError(NOFError, ValueError):
    pass


class MalformedCodeError(NOFError, ValueError):
    pass


class CoverError(NOFError):
    """Cover construction failed or a shift family does not cover a point."""


class ParseError(NOFError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
