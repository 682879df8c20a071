"""Exception types shared across the package."""


class InputError(Exception):
    """Bad input file or configuration; maps to CLI exit code 1."""


class ParseError(InputError):
    """A line or record could not be parsed; message carries file and line."""


class ValidationError(InputError):
    """Parsed data violates a structural invariant (duplicate ids, unknown
    references, items outside the candidate pool)."""


class EmptyDistributionError(ValueError):
    """No item contributed a key, so no distribution can be built.  The
    evaluation driver turns these into skip entries rather than failures."""


class UnsmoothedZeroError(ValueError):
    """KL divergence hit p(x) > 0 with q(x) == 0; smooth the pair first."""
