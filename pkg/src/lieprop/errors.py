"""Exception hierarchy for lieprop."""


class LiepropError(Exception):
    """Base class for all lieprop errors."""


class ConfigError(LiepropError, ValueError):
    """Scenario configuration is missing, malformed or inconsistent."""


class InvalidIndexError(LiepropError, ValueError):
    """Generator or axis index outside 1..3, or an unsupported (kind, axis) pair."""


class FactorizationError(LiepropError):
    """The two-angle construction cannot be applied to a trajectory."""


class DegenerateAxisError(FactorizationError):
    """z = sqrt(a1^2 + a2^2) fell below epsilon; the angle phi is undefined."""


class SignViolationError(FactorizationError):
    """a3 <= 0 on a branch that assumes a3 > 0."""


class BranchMismatchError(FactorizationError):
    """Inputs are inconsistent with the requested SU(1,1) branch."""


class GimbalLockError(LiepropError):
    """Outer angles of a three-angle decomposition are not separately determined."""


class RepresentationError(LiepropError):
    """A 2x2 matrix is singular or does not act as a group element."""


class NonFiniteError(LiepropError):
    """Propagation produced NaN or Inf."""


class GridMismatchError(LiepropError):
    """Two series were built on different time grids."""


class FieldDomainError(LiepropError):
    """A coefficient field was evaluated outside its domain."""
