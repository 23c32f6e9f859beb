"""Exception hierarchy. Every error carries a stable ``code`` string."""


class ExtensionError(Exception):
    code = "ERROR"

    def __init__(self, message, code=None):
        super().__init__(message)
        if code is not None:
            self.code = code

    def __str__(self):
        return f"{self.code}: {super().__str__()}"


class InstanceError(ExtensionError):
    """Raised by validation: NEGATIVE_VALUE, DUPLICATE_ID, BAD_QUERY, OVERFLOW_RISK, BAD_SHAPE."""

    code = "BAD_INSTANCE"


class WrongVariant(ExtensionError):
    code = "WRONG_VARIANT"


class ValuesTooLarge(ExtensionError):
    code = "VALUES_TOO_LARGE"


class GammaNotEF(ExtensionError):
    code = "GAMMA_NOT_EF"


class MalformedGraph(ExtensionError):
    code = "MALFORMED_GRAPH"


class BadParams(ExtensionError):
    code = "BAD_PARAMS"


class NotAClique(ExtensionError):
    code = "NOT_A_CLIQUE"


class InternalInvariantViolation(ExtensionError):
    code = "INTERNAL_INVARIANT_VIOLATION"


class ParseError(ExtensionError):
    code = "PARSE_ERROR"

    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column


class SchemaError(ExtensionError):
    code = "SCHEMA_ERROR"


class GenRetryExhausted(ExtensionError):
    code = "GEN_RETRY_EXHAUSTED"
