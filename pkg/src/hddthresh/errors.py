"""Exception hierarchy shared by the library and the CLI exit-code mapping."""


class HDDError(Exception):
    """Base class for all errors raised by hddthresh."""


class ConfigurationError(HDDError, ValueError):
    """Unsupported or inconsistent parameters (CLI exit status 2)."""


class DesignMismatchError(ConfigurationError):
    """BCH generator degree differs from nu*t, so the designed (n, k) formula fails."""


class NumericalConsistencyError(HDDError, ArithmeticError):
    """A computed quantity violated an invariant it must satisfy (CLI exit status 3)."""


class BracketError(NumericalConsistencyError):
    """Both ends of a threshold bracket produced the same verdict."""


class DomainError(NumericalConsistencyError):
    """A minimiser ran into the edge of its search domain."""
