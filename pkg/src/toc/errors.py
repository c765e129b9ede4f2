"""Exception types shared across the package."""


class TocError(Exception):
    pass


class GraphError(TocError, ValueError):
    """Invalid edge, node index or partition."""


class IngestError(TocError, ValueError):
    """Malformed dataset input. Carries the 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UnknownTopicError(TocError, ValueError):
    def __init__(self, missing, known):
        self.missing = sorted(missing)
        self.known = sorted(known)
        super().__init__(
            f"unknown topic(s) {', '.join(self.missing)}; "
            f"known topics: {', '.join(self.known) or '(none)'}"
        )


class UndefinedMetricError(TocError, ArithmeticError):
    """A metric whose formula has a zero or negative denominator."""


class EmptyInputError(TocError, ValueError):
    pass
