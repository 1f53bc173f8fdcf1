"""Exception types shared by every module.

The CLI maps these onto exit codes: InputError -> 2, ResourceError -> 3.
"""


class FodpError(Exception):
    pass


class InputError(FodpError, ValueError):
    """Malformed input: unknown vertex, bad file, arity mismatch, root mismatch."""


class ParseError(InputError):
    def __init__(self, msg, line=1, col=1):
        super().__init__(f"{msg} (line {line}, column {col})")
        self.line = line
        self.col = col


class ResourceError(FodpError):
    """A brute-force search would exceed its configured size cap."""


class EngineError(FodpError):
    """An audit-mode invariant failed inside the model-checking engine."""
