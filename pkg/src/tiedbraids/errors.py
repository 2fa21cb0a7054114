"""Exception types shared across the package."""


class InputError(ValueError):
    """Malformed or inconsistent input (bad token, index out of range, flavor mismatch)."""


class DiagramError(InputError):
    """A Morse diagram violates width bookkeeping or boundary conditions."""

    def __init__(self, message, row=None, expected=None, actual=None):
        super().__init__(message)
        self.row = row
        self.expected = expected
        self.actual = actual


class ResolutionLimitError(InputError):
    """Too many pre-crossings to enumerate resolutions."""
