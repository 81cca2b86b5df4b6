"""2x2 representations of the generators, closed-form exponentials and adjoint actions.

su(2):   S_j = sigma_j / 2.
su(1,1): S_1 = -(i/2) sigma_1, S_2 = (i/2) sigma_2, S_3 = sigma_3 / 2; group
elements preserve the metric eta = diag(1, -1).

Functions taking a coefficient or a matrix broadcast over leading axes, so a
whole time series is handled in one call.
"""

import logging

import numpy as np

from .algebra import AlgebraKind
from .errors import InvalidIndexError, RepresentationError

logger = logging.getLogger(__name__)

PAULI = np.array([
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=complex)
PAULI.setflags(write=False)

ETA = np.diag([1.0, -1.0]).astype(complex)
ETA.setflags(write=False)

_GENERATORS = {
    AlgebraKind.SU2: PAULI / 2,
    AlgebraKind.SU11: np.array([-0.5j * PAULI[0], 0.5j * PAULI[1], 0.5 * PAULI[2]]),
}
for _gens in _GENERATORS.values():
    _gens.setflags(write=False)

# S_j^2 = sign * I/4: +1 for compact directions (trigonometric exponentials),
# -1 for non-compact ones (hyperbolic exponentials).
_SQUARE_SIGN = {
    AlgebraKind.SU2: (1, 1, 1),
    AlgebraKind.SU11: (-1, -1, 1),
}

# Smallest |sqrt(delta)| for which the closed-form exponential is used as is.
SERIES_THRESHOLD = 1e-6

# Largest residual accepted when extracting an adjoint action.
ADJOINT_RESIDUAL_TOL = 1e-8


def _check_index(j: int) -> int:
    if j not in (1, 2, 3):
        raise InvalidIndexError(f"Generator index must be 1, 2 or 3, got {j!r}")
    return j


def generators(kind: AlgebraKind) -> np.ndarray:
    """All three generator matrices, shape (3, 2, 2), read-only."""
    return _GENERATORS[AlgebraKind.parse(kind)]


def generator_2x2(kind: AlgebraKind, j: int) -> np.ndarray:
    """The 2x2 matrix of S_j (1-based index)."""
    return generators(kind)[_check_index(j) - 1].copy()


def algebra_element(kind: AlgebraKind, coeffs) -> np.ndarray:
    """sum_j x_j S_j for real or complex coefficients of shape (..., 3)."""
    return np.einsum("...j,jab->...ab", np.asarray(coeffs), generators(kind))


def exp_generator(kind: AlgebraKind, j: int, c) -> np.ndarray:
    """exp(i c S_j) in closed form; c may be an array of coefficients.

    Callers wanting exp(-i c S_j) pass -c.
    """
    kind = AlgebraKind.parse(kind)
    gen = generators(kind)[_check_index(j) - 1]
    half = np.asarray(c, dtype=float)[..., None, None] / 2
    eye = np.eye(2)
    if _SQUARE_SIGN[kind][j - 1] > 0:
        return np.cos(half) * eye + 2j * np.sin(half) * gen
    return np.cosh(half) * eye + 2j * np.sinh(half) * gen


def expm_traceless(x) -> np.ndarray:
    """exp(X) for traceless 2x2 matrices X, shape (..., 2, 2).

    Uses X^2 = delta I with delta = -det X: exp(X) = cosh(s) I + sinh(s)/s X,
    s = sqrt(delta), switching to the series of both functions for small |s|.
    """
    x = np.asarray(x, dtype=complex)
    delta = -(x[..., 0, 0] * x[..., 1, 1] - x[..., 0, 1] * x[..., 1, 0])
    s = np.sqrt(delta)
    small = np.abs(s) < SERIES_THRESHOLD
    safe_s = np.where(small, 1.0, s)
    cosh = np.where(small, 1 + delta / 2 + delta**2 / 24, np.cosh(safe_s))
    sinhc = np.where(small, 1 + delta / 6 + delta**2 / 120, np.sinh(safe_s) / safe_s)
    return cosh[..., None, None] * np.eye(2) + sinhc[..., None, None] * x


def exp_algebra(kind: AlgebraKind, coeffs, scale=1j) -> np.ndarray:
    """exp(scale * sum_j x_j S_j) for real coefficients x of shape (..., 3)."""
    return expm_traceless(scale * algebra_element(kind, coeffs))


def adjoint_rotation(kind: AlgebraKind, axis: int, angle) -> np.ndarray:
    """The 3x3 matrices R_1, R_2, R_3 (su(2)) and P_1, R_3 (su(1,1)).

    R_j(q) is the adjoint action of exp(i q S_j) in su(2); in su(1,1),
    P_1(chi) and R_3(phi) are the adjoint actions of exp(-i chi S_1) and
    exp(-i phi S_3).
    """
    kind = AlgebraKind.parse(kind)
    _check_index(axis)
    if kind is AlgebraKind.SU11 and axis == 2:
        raise InvalidIndexError("su(1,1) has no adjoint rotation about axis 2 in this signature")
    q = np.asarray(angle, dtype=float)
    out = np.zeros(q.shape + (3, 3))
    if kind is AlgebraKind.SU11 and axis == 1:
        c, s = np.cosh(q), np.sinh(q)
        out[..., 0, 0] = 1
        out[..., 1, 1] = c
        out[..., 1, 2] = s
        out[..., 2, 1] = s
        out[..., 2, 2] = c
        return out
    c, s = np.cos(q), np.sin(q)
    # (i, j) are the rotated plane; the remaining axis is fixed.
    i, j = {1: (1, 2), 2: (2, 0), 3: (0, 1)}[axis]
    fixed = axis - 1
    out[..., fixed, fixed] = 1
    out[..., i, i] = c
    out[..., j, j] = c
    out[..., i, j] = s
    out[..., j, i] = -s
    return out


def axis_angle_rotation(n, phi: float) -> np.ndarray:
    """Rotation by phi about the unit axis n (Rodrigues form).

    Equals adjoint_action(SU2, exp(-i (phi/2) n.sigma)):
    R u = cos(phi) u + sin(phi) n x u + (1 - cos(phi)) (n.u) n.
    """
    n = np.asarray(n, dtype=float)
    if n.shape != (3,) or abs(np.linalg.norm(n) - 1) > 1e-10:
        raise ValueError(f"Rotation axis must be a unit 3-vector, got {n.tolist()}")
    cross = np.array([
        [0.0, -n[2], n[1]],
        [n[2], 0.0, -n[0]],
        [-n[1], n[0], 0.0],
    ])
    return np.cos(phi) * np.eye(3) + np.sin(phi) * cross + (1 - np.cos(phi)) * np.outer(n, n)


def adjoint_action(kind: AlgebraKind, m) -> np.ndarray:
    """The W with M S_j M^-1 = sum_m W_mj S_m, for M of shape (..., 2, 2).

    Solves the linear system against the flattened generator basis and rejects
    results that are not real combinations of the generators.
    """
    kind = AlgebraKind.parse(kind)
    m = np.asarray(m, dtype=complex)
    det = m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]
    scale = np.sum(np.abs(m) ** 2, axis=(-2, -1))
    if np.any(np.abs(det) <= 1e-14 * scale):
        raise RepresentationError("Matrix is singular; no adjoint action")
    gens = generators(kind)
    m_inv = np.linalg.inv(m)
    conj = np.einsum("...ab,jbc,...cd->...jad", m, gens, m_inv)
    basis = gens.reshape(3, 4).T
    rhs = conj.reshape(conj.shape[:-3] + (3, 4))
    flat_rhs = rhs.reshape(-1, 4).T
    solution, *_ = np.linalg.lstsq(basis, flat_rhs, rcond=None)
    residual = np.abs(basis @ solution - flat_rhs).max(initial=0.0)
    imag = np.abs(solution.imag).max(initial=0.0)
    if residual > ADJOINT_RESIDUAL_TOL or imag > ADJOINT_RESIDUAL_TOL:
        raise RepresentationError(
            f"Matrix does not act on the {kind.value} generators "
            f"(residual {residual:.3e}, imaginary part {imag:.3e})"
        )
    # solution[m, (batch, j)] -> W[batch, m, j]
    w = solution.real.T.reshape(conj.shape[:-3] + (3, 3))
    return np.swapaxes(w, -1, -2)
