"""Two-angle Euler factorization of the adjoint flow, alpha(t), tau(t) and K(t).

The canonical construction rotates a(t) into a fixed reference vector with
R_1(-theta) R_3(-phi) (su(2)) or P_1(-chi) R_3(-phi) (su(1,1)). Its angles,
the coefficient alpha = (a1 h1 + a2 h2) / z^2 and the effective time
tau = -int alpha are collected in a FactorizationRecord.

Also here: Wei-Norman (R1 R2 R3), three-angle Euler (R3 R1 R3) and axis-angle
decompositions of rotation matrices.
"""

import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .algebra import AdjointVector, AlgebraKind
from .dynamics import DEFAULT_EPSILON, Trajectory, grid_step
from .errors import BranchMismatchError, DegenerateAxisError, GimbalLockError, SignViolationError
from .matrix_reps import adjoint_rotation, axis_angle_rotation

logger = logging.getLogger(__name__)

GIMBAL_TOL = 1e-8
ORTHOGONALITY_TOL = 1e-8


class Branch(str, Enum):
    """Which two-angle construction applies to a trajectory."""

    GENERIC = "generic"
    NULL_CONE = "null_cone"
    TIMELIKE_DOMINANT = "timelike_dominant"


def classify_branch(kind: AlgebraKind, a, epsilon: float = DEFAULT_EPSILON) -> Branch:
    """Branch from the sign of z^2 - a3^2 (su(2) is always generic).

    The Killing norm is conserved, so the branch of a(0) holds for the whole
    trajectory.
    """
    if AlgebraKind.parse(kind) is AlgebraKind.SU2:
        return Branch.GENERIC
    a1, a2, a3 = AdjointVector.of(a).to_list()
    gap = a1**2 + a2**2 - a3**2
    scale = a1**2 + a2**2 + a3**2
    if abs(gap) <= epsilon * scale:
        return Branch.NULL_CONE
    return Branch.GENERIC if gap > 0 else Branch.TIMELIKE_DOMINANT


def _require_z(z, epsilon: float, times=None) -> None:
    z = np.asarray(z)
    if np.any(z < epsilon):
        where = int(np.argmin(z))
        at = f" at t={times[where]:g}" if times is not None else ""
        raise DegenerateAxisError(
            f"DegenerateAxis: z = {z.flat[where]:.3e} < epsilon = {epsilon:g}{at}; "
            "a(t) is aligned with axis 3"
        )


def _require_positive_a3(a3, branch: Branch) -> None:
    if np.any(np.asarray(a3) <= 0):
        raise SignViolationError(f"SignViolation: the {branch.value} branch assumes a3 > 0")


def _require_same_branch(a: np.ndarray, branch: Branch, epsilon: float, times) -> None:
    """Reject points on the opposite side of the null cone from a(0)."""
    if branch is Branch.NULL_CONE:
        return
    gap = a[:, 0] ** 2 + a[:, 1] ** 2 - a[:, 2] ** 2
    scale = np.sum(a**2, axis=-1)
    flipped = (gap < -epsilon * scale) if branch is Branch.GENERIC else (gap > epsilon * scale)
    if np.any(flipped):
        where = int(np.argmax(flipped))
        raise BranchMismatchError(
            f"BranchMismatch: a(0) is on the {branch.value} branch but a(t) leaves it at t={times[where]:g}"
        )


def _phi(a: np.ndarray) -> np.ndarray:
    return np.arctan2(a[..., 0], a[..., 1])


def _su11_chi(a: np.ndarray, branch: Branch, a3_ref: float) -> np.ndarray:
    z = np.hypot(a[..., 0], a[..., 1])
    a3 = a[..., 2]
    if branch is Branch.NULL_CONE:
        return np.log(a3 / a3_ref)
    if branch is Branch.GENERIC:
        mu = np.sqrt(np.maximum(z**2 - a3**2, 0.0))
        return np.arcsinh(a3 / mu)
    mu = np.sqrt(np.maximum(a3**2 - z**2, 0.0))
    return np.arcsinh(z / mu)


def euler_two_angle_su2(a, epsilon: float = DEFAULT_EPSILON) -> tuple[float, float]:
    """(phi, theta) with sin phi = a1/z, cos phi = a2/z, sin theta = -a3/lambda, cos theta = z/lambda."""
    a = AdjointVector.of(a)
    _require_z(a.z, epsilon)
    return float(np.arctan2(a.a1, a.a2)), float(np.arctan2(-a.a3, a.z))


def euler_two_angle_su11(a, epsilon: float = DEFAULT_EPSILON,
                         a3_ref: float | None = None) -> tuple[float, float, Branch]:
    """(phi, chi, branch) for an su(1,1) vector.

    On the null cone chi is fixed by e^chi = a3 / a3_ref, where a3_ref is a3 at
    the reference time (defaults to a's own a3, giving chi = 0).
    """
    a = AdjointVector.of(a)
    branch = classify_branch(AlgebraKind.SU11, a, epsilon)
    if branch is not Branch.GENERIC:
        _require_positive_a3(a.a3, branch)
    _require_z(a.z, epsilon)
    ref = a.a3 if a3_ref is None else a3_ref
    chi = _su11_chi(a.components, branch, ref)
    return float(np.arctan2(a.a1, a.a2)), float(chi), branch


def alpha_array(h, a) -> np.ndarray:
    """alpha = (a1 h1 + a2 h2) / z^2, broadcasting over leading axes."""
    h = np.asarray(h, dtype=float)
    a = np.asarray(a, dtype=float)
    return (a[..., 0] * h[..., 0] + a[..., 1] * h[..., 1]) / (a[..., 0] ** 2 + a[..., 1] ** 2)


def alpha(h, a, epsilon: float = DEFAULT_EPSILON) -> float:
    """Coefficient of a in k = h - alpha a (same formula for both algebras)."""
    a = AdjointVector.of(a)
    _require_z(a.z, epsilon)
    return float(alpha_array(h, a.components))


def effective_time(alpha_samples, dt: float) -> np.ndarray:
    """tau(t_n) = -int_0^t_n alpha on a uniform grid.

    Composite Simpson up to every even index; odd indices add a trapezoid over
    their last interval.
    """
    f = np.asarray(alpha_samples, dtype=float)
    integral = np.zeros_like(f)
    if f.size >= 3:
        panels = dt / 3 * (f[:-2:2] + 4 * f[1:-1:2] + f[2::2])
        integral[2::2] = np.cumsum(panels)
    if f.size >= 2:
        integral[1::2] = integral[:-1:2] + dt / 2 * (f[:-1:2] + f[1::2])
    return -integral


@dataclass(frozen=True)
class FactorizationRecord:
    """Angles, alpha and tau of the two-angle construction on a grid.

    ``second_angle`` is theta for su(2) and the rapidity chi for su(1,1).
    """

    kind: AlgebraKind
    branch: Branch
    times: np.ndarray
    phi: np.ndarray
    second_angle: np.ndarray
    alpha: np.ndarray
    tau: np.ndarray

    @property
    def branches(self) -> list[Branch]:
        return [self.branch] * len(self.times)

    def __len__(self) -> int:
        return len(self.times)


def factorize(trajectory: Trajectory, epsilon: float = DEFAULT_EPSILON) -> FactorizationRecord:
    """Extract the two-angle factorization along a trajectory."""
    kind = trajectory.kind
    a = trajectory.a
    dt = grid_step(trajectory.times)
    branch = classify_branch(kind, a[0], epsilon)
    logger.debug("Factorizing %s trajectory on the %s branch", kind.value, branch.value)
    if branch is not Branch.GENERIC:
        _require_positive_a3(a[:, 2], branch)
    if kind is AlgebraKind.SU11:
        _require_same_branch(a, branch, epsilon, trajectory.times)
    _require_z(trajectory.z, epsilon, trajectory.times)

    phi = np.unwrap(_phi(a))
    if kind is AlgebraKind.SU2:
        second = np.arctan2(-a[:, 2], trajectory.z)
    else:
        second = _su11_chi(a, branch, a[0, 2])
    alphas = alpha_array(trajectory.h, a)
    return FactorizationRecord(
        kind=kind,
        branch=branch,
        times=trajectory.times,
        phi=phi,
        second_angle=second,
        alpha=alphas,
        tau=effective_time(alphas, dt),
    )


@dataclass(frozen=True)
class KCoefficients:
    """Coefficients k(t) of K(t) = i (dV/dt) V^-1 on the grid."""

    times: np.ndarray
    k: np.ndarray


def k_coefficients(record: FactorizationRecord, trajectory: Trajectory) -> KCoefficients:
    """k from a(t) and a'(t) = h x a; z^2 is replaced by a3^2 on the null cone."""
    a = trajectory.a
    a_dot = trajectory.a_dot
    a1, a2, a3 = a[:, 0], a[:, 1], a[:, 2]
    d1, d2, d3 = a_dot[:, 0], a_dot[:, 1], a_dot[:, 2]
    if record.branch is Branch.NULL_CONE:
        den = a3**2
    else:
        den = a1**2 + a2**2
    if record.kind is AlgebraKind.SU2:
        k3 = a1 * d2 - a2 * d1
    else:
        k3 = a2 * d1 - a1 * d2
    k = np.stack([a2 * d3, -a1 * d3, k3], axis=-1) / den[:, None]
    return KCoefficients(times=record.times, k=k)


def proposition_residual(record: FactorizationRecord, trajectory: Trajectory,
                         k: KCoefficients | None = None) -> np.ndarray:
    """|k - (h - alpha a)| at every grid point."""
    if k is None:
        k = k_coefficients(record, trajectory)
    expected = trajectory.h - record.alpha[:, None] * trajectory.a
    return np.linalg.norm(k.k - expected, axis=-1)


def canonical_rotation(record: FactorizationRecord, index=None) -> np.ndarray:
    """Adjoint action W(t) of the two-angle V(t); W(t) a(0) = a(t).

    su(2): R3(phi) R1(theta) R1(-theta0) R3(-phi0).
    su(1,1): R3(phi) P1(chi) P1(-chi0) R3(-phi0).
    Without ``index`` the whole series is returned, shape (N, 3, 3).
    """
    phi = record.phi if index is None else record.phi[index]
    second = record.second_angle if index is None else record.second_angle[index]
    kind = record.kind
    first = adjoint_rotation(kind, 3, phi) @ adjoint_rotation(kind, 1, second)
    initial = adjoint_rotation(kind, 1, -record.second_angle[0]) @ adjoint_rotation(kind, 3, -record.phi[0])
    return first @ initial


def _require_orthogonal(w) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if w.shape != (3, 3) or np.abs(w.T @ w - np.eye(3)).max() > ORTHOGONALITY_TOL:
        raise ValueError("Expected an orthogonal 3x3 matrix")
    return w


def compose_wei_norman(q1: float, q2: float, q3: float) -> np.ndarray:
    """R1(q1) R2(q2) R3(q3)."""
    kind = AlgebraKind.SU2
    return adjoint_rotation(kind, 1, q1) @ adjoint_rotation(kind, 2, q2) @ adjoint_rotation(kind, 3, q3)


def wei_norman_angles(w) -> tuple[float, float, float]:
    """(q1, q2, q3) with W = R1(q1) R2(q2) R3(q3) and q2 in [-pi/2, pi/2]."""
    w = _require_orthogonal(w)
    cos_q2 = np.hypot(w[1, 2], w[2, 2])
    if cos_q2 < GIMBAL_TOL:
        raise GimbalLockError(f"GimbalLock: |cos q2| = {cos_q2:.3e}; q1 and q3 are not separately determined")
    q2 = np.arctan2(-w[0, 2], cos_q2)
    q1 = np.arctan2(w[1, 2], w[2, 2])
    q3 = np.arctan2(w[0, 1], w[0, 0])
    return float(q1), float(q2), float(q3)


def compose_three_angle_euler(psi: float, theta: float, phi: float) -> np.ndarray:
    """R3(psi) R1(theta) R3(phi)."""
    kind = AlgebraKind.SU2
    return adjoint_rotation(kind, 3, psi) @ adjoint_rotation(kind, 1, theta) @ adjoint_rotation(kind, 3, phi)


def three_angle_euler(w) -> tuple[float, float, float]:
    """(psi, theta, phi) with W = R3(psi) R1(theta) R3(phi) and theta in [0, pi].

    The identity maps to (0, 0, 0); any other W with sin theta ~ 0 is gimbal lock.
    """
    w = _require_orthogonal(w)
    sin_theta = np.hypot(w[0, 2], w[1, 2])
    if sin_theta < GIMBAL_TOL:
        if np.abs(w - np.eye(3)).max() < 1e-12:
            return 0.0, 0.0, 0.0
        raise GimbalLockError(f"GimbalLock: |sin theta| = {sin_theta:.3e}; psi and phi are not separately determined")
    theta = np.arctan2(sin_theta, w[2, 2])
    psi = np.arctan2(w[0, 2], w[1, 2])
    phi = np.arctan2(w[2, 0], -w[2, 1])
    return float(psi), float(theta), float(phi)


def magnus_axis_angle(w) -> tuple[np.ndarray, float]:
    """(n, phi) with W = axis_angle_rotation(n, phi), phi in [0, pi].

    phi = 0 gives n = (0, 0, 1); near phi = pi the axis comes from the
    symmetric part, signed so that its largest component is positive.
    """
    w = _require_orthogonal(w)
    v = np.array([w[2, 1] - w[1, 2], w[0, 2] - w[2, 0], w[1, 0] - w[0, 1]])
    sin_phi = np.linalg.norm(v) / 2
    cos_phi = (np.trace(w) - 1) / 2
    phi = float(np.arctan2(sin_phi, cos_phi))
    if sin_phi < 1e-14 and cos_phi > 0:
        return np.array([0.0, 0.0, 1.0]), 0.0
    if sin_phi < 1e-6 and cos_phi < 0:
        sym = (w + w.T) / 2 - cos_phi * np.eye(3)
        k = int(np.argmax(np.diag(sym)))
        n = sym[:, k] / np.sqrt(sym[k, k] * (1 - cos_phi))
        return n / np.linalg.norm(n), phi
    return v / np.linalg.norm(v), phi


def compose_axis_angle(n, phi: float) -> np.ndarray:
    """Inverse of magnus_axis_angle."""
    return axis_angle_rotation(n, phi)
