"""Exception hierarchy shared across the package.

The CLI maps these onto process exit codes, so raising the right class
matters more than the message text.
"""


class ProxRsaError(Exception):
    """Base class for all package errors."""


class ParameterError(ProxRsaError):
    """A precondition on user-supplied parameters was violated (exit 3)."""


class NotInvertibleError(ParameterError):
    """Modular inverse requested for a non-unit (gcd != 1)."""


class InfeasibleError(ParameterError):
    """Requested residue count cannot exist for the given modulus."""


class SearchExhaustedError(ProxRsaError):
    """A bounded search ran out of candidates (exit 2)."""


class StreamExhaustedError(SearchExhaustedError):
    """A seed stream's 64-bit counter overflowed."""


class RangeTooLargeError(ParameterError):
    """Sieve or census range exceeds the supported budget."""
