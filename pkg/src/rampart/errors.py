class ValidationError(ValueError):
    """Malformed input: bad blocks, refinement violations, parse failures."""


class CapExceededError(RuntimeError):
    """A configured enumeration or dimension cap would be exceeded."""
