"""Assembly of V(t) and U(t) = V(t) exp(i tau(t) sum_j a_j(0) S_j), and the
closed-form general solutions of x' = h x x built on the special solution.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from .algebra import AdjointVector, AlgebraKind
from .dynamics import DEFAULT_EPSILON
from .errors import BranchMismatchError, DegenerateAxisError, FactorizationError
from .factorization import (
    Branch,
    FactorizationRecord,
    classify_branch,
    magnus_axis_angle,
    three_angle_euler,
    wei_norman_angles,
)
from .matrix_reps import adjoint_action, exp_algebra, exp_generator

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PropagatorSeries:
    """V(t) and U(t) in the 2x2 representation on the record's grid."""

    kind: AlgebraKind
    times: np.ndarray
    V: np.ndarray
    U: np.ndarray

    def __len__(self) -> int:
        return len(self.times)


@dataclass(frozen=True)
class GeneralSolutionConstants:
    """Constants (A, B, C) of a general solution.

    ``conjugate`` selects the su(1,1) generic sector with sinh and cosh
    exchanged, reaching initial values with |B sinh C| > |B cosh C|.
    """

    A: float
    B: float
    C: float
    conjugate: bool = False

    def to_dict(self) -> dict:
        return {"A": self.A, "B": self.B, "C": self.C, "conjugate": self.conjugate}


def _index(series, index):
    return series if index is None else series[index]


def build_V(record: FactorizationRecord, index=None) -> np.ndarray:
    """Two-angle V at grid ``index`` (or the whole series when omitted).

    su(2):   e^{i phi S3} e^{i theta S1} e^{-i theta0 S1} e^{-i phi0 S3}
    su(1,1): e^{-i phi S3} e^{-i chi S1} e^{i chi0 S1} e^{i phi0 S3}
    """
    kind = record.kind
    phi = _index(record.phi, index)
    second = _index(record.second_angle, index)
    phi0, second0 = record.phi[0], record.second_angle[0]
    sign = 1.0 if kind is AlgebraKind.SU2 else -1.0
    current = exp_generator(kind, 3, sign * phi) @ exp_generator(kind, 1, sign * second)
    initial = exp_generator(kind, 1, -sign * second0) @ exp_generator(kind, 3, -sign * phi0)
    return current @ initial


def build_U(kind: AlgebraKind, V, tau, a0) -> np.ndarray:
    """U = V exp(i tau sum_j a_j(0) S_j); V and tau may be series."""
    a0 = AdjointVector.of(a0).components
    tau = np.asarray(tau, dtype=float)
    if not np.all(np.isfinite(tau)):
        raise ValueError("tau must be finite")
    return np.asarray(V) @ exp_algebra(kind, tau[..., None] * a0)


def build_U_left(kind: AlgebraKind, V, tau, a_t) -> np.ndarray:
    """U = exp(i tau sum_j a_j(t) S_j) V, the left-ordered form."""
    tau = np.asarray(tau, dtype=float)
    return exp_algebra(kind, tau[..., None] * np.asarray(a_t, dtype=float)) @ np.asarray(V)


def assemble(record: FactorizationRecord, a0) -> PropagatorSeries:
    """Build the V and U series for a factorization record."""
    V = build_V(record)
    U = build_U(record.kind, V, record.tau, a0)
    logger.debug("Assembled %d propagators (%s, %s branch)", len(record), record.kind.value, record.branch.value)
    return PropagatorSeries(kind=record.kind, times=record.times, V=V, U=U)


def magnus_V(W) -> np.ndarray:
    """exp(-i phi n.S) with (n, phi) the axis and angle of the rotation W (su(2))."""
    n, phi = magnus_axis_angle(W)
    return exp_algebra(AlgebraKind.SU2, -phi * n)


def wei_norman_V(W) -> np.ndarray:
    """e^{i q1 S1} e^{i q2 S2} e^{i q3 S3} with W = R1(q1) R2(q2) R3(q3)."""
    kind = AlgebraKind.SU2
    q1, q2, q3 = wei_norman_angles(W)
    return exp_generator(kind, 1, q1) @ exp_generator(kind, 2, q2) @ exp_generator(kind, 3, q3)


def euler_V(W) -> np.ndarray:
    """e^{i psi S3} e^{i theta S1} e^{i phi S3} with W = R3(psi) R1(theta) R3(phi)."""
    kind = AlgebraKind.SU2
    psi, theta, phi = three_angle_euler(W)
    return exp_generator(kind, 3, psi) @ exp_generator(kind, 1, theta) @ exp_generator(kind, 3, phi)


def alternative_forms(V) -> dict[str, np.ndarray]:
    """The Magnus, Wei-Norman and Euler forms of an su(2) V.

    Each has the same adjoint action as V and equals V or -V.
    """
    W = adjoint_action(AlgebraKind.SU2, V)
    return {"magnus": magnus_V(W), "wei_norman": wei_norman_V(W), "euler": euler_V(W)}


def _frame(a: np.ndarray, epsilon: float):
    z = np.hypot(a[..., 0], a[..., 1])
    if np.any(z < epsilon):
        raise DegenerateAxisError(f"DegenerateAxis: z = {np.min(z):.3e} < epsilon = {epsilon:g}")
    transverse = np.stack([a[..., 1], -a[..., 0], np.zeros_like(z)], axis=-1)
    return z, transverse


def general_solution_su2(a, tau, consts: GeneralSolutionConstants,
                         epsilon: float = DEFAULT_EPSILON) -> np.ndarray:
    """x = A a - (lam B / z) cos(lam tau + C) (a2, -a1, 0) + (B / z) sin(lam tau + C) (a3 a1, a3 a2, -z^2).

    ``a`` and ``tau`` are values at the same time(s); shapes (..., 3) and (...).
    """
    a = np.asarray(a, dtype=float)
    tau = np.asarray(tau, dtype=float)
    z, transverse = _frame(a, epsilon)
    lam = np.linalg.norm(a, axis=-1)
    vertical = np.stack([a[..., 2] * a[..., 0], a[..., 2] * a[..., 1], -z**2], axis=-1)
    phase = lam * tau + consts.C
    return (
        consts.A * a
        - (lam * consts.B / z * np.cos(phase))[..., None] * transverse
        + (consts.B / z * np.sin(phase))[..., None] * vertical
    )


def general_solution_su11(a, tau, consts: GeneralSolutionConstants, branch: Branch,
                          epsilon: float = DEFAULT_EPSILON) -> np.ndarray:
    """General solution on one su(1,1) branch.

    generic:   x = A a + (mu B / z) cosh(mu tau + C) (a2, -a1, 0) + (B / z) sinh(mu tau + C) (a3 a1, a3 a2, z^2)
               (cosh and sinh exchanged when ``consts.conjugate``)
    timelike:  the same with cos and sin, mu = sqrt(a3^2 - z^2)
    null cone: x = (A + B tau + C tau^2) a + (a3 / z^2)(B + 2 C tau)(a2, -a1, 0) + (C / z^2)(-a1, -a2, a3)
    """
    a = np.asarray(a, dtype=float)
    tau = np.asarray(tau, dtype=float)
    first = a.reshape(-1, 3)[0]
    if classify_branch(AlgebraKind.SU11, first, epsilon) is not branch:
        raise BranchMismatchError(f"a = {first.tolist()} is not on the {branch.value} branch")
    z, transverse = _frame(a, epsilon)
    a3 = a[..., 2]

    if branch is Branch.NULL_CONE:
        opposite = np.stack([-a[..., 0], -a[..., 1], a3], axis=-1)
        return (
            (consts.A + consts.B * tau + consts.C * tau**2)[..., None] * a
            + (a3 / z**2 * (consts.B + 2 * consts.C * tau))[..., None] * transverse
            + (consts.C / z**2)[..., None] * opposite
        )

    vertical = np.stack([a3 * a[..., 0], a3 * a[..., 1], z**2], axis=-1)
    mu = np.sqrt(np.abs(z**2 - a3**2))
    phase = mu * tau + consts.C
    if branch is Branch.TIMELIKE_DOMINANT:
        along, across = np.cos(phase), np.sin(phase)
    elif consts.conjugate:
        along, across = np.sinh(phase), np.cosh(phase)
    else:
        along, across = np.cosh(phase), np.sinh(phase)
    return (
        consts.A * a
        + (mu * consts.B / z * along)[..., None] * transverse
        + (consts.B / z * across)[..., None] * vertical
    )


def general_solution(kind: AlgebraKind, a, tau, consts: GeneralSolutionConstants,
                     branch: Branch = Branch.GENERIC, epsilon: float = DEFAULT_EPSILON) -> np.ndarray:
    if AlgebraKind.parse(kind) is AlgebraKind.SU2:
        return general_solution_su2(a, tau, consts, epsilon)
    return general_solution_su11(a, tau, consts, branch, epsilon)


def fit_constants(kind: AlgebraKind, a0, x0, branch: Branch = Branch.GENERIC,
                  epsilon: float = DEFAULT_EPSILON) -> GeneralSolutionConstants:
    """Constants whose general solution starts at x0 (tau = 0 at t = 0).

    Solves for the coefficients of x0 in the basis {a, (a2, -a1, 0), third}
    and maps them back to (A, B, C).
    """
    kind = AlgebraKind.parse(kind)
    a = AdjointVector.of(a0)
    x0 = np.asarray(x0, dtype=float)
    if kind is AlgebraKind.SU11 and classify_branch(kind, a, epsilon) is not branch:
        raise BranchMismatchError(f"a0 = {a.to_list()} is not on the {branch.value} branch")
    z = a.z
    if z < epsilon:
        raise DegenerateAxisError(f"DegenerateAxis: z = {z:.3e} < epsilon = {epsilon:g}")
    a1, a2, a3 = a.to_list()
    transverse = [a2, -a1, 0.0]
    if kind is AlgebraKind.SU2:
        third = [a3 * a1, a3 * a2, -z**2]
    elif branch is Branch.NULL_CONE:
        third = [-a1, -a2, a3]
    else:
        third = [a3 * a1, a3 * a2, z**2]
    basis = np.array([a.components, transverse, third]).T
    A, p, q = np.linalg.solve(basis, x0)

    if kind is AlgebraKind.SU2:
        b_cos, b_sin = -p * z / a.lam, q * z
        B = math.hypot(b_cos, b_sin)
        C = math.atan2(b_sin, b_cos) % (2 * math.pi) if B > 0 else 0.0
        return GeneralSolutionConstants(float(A), B, C)
    if branch is Branch.NULL_CONE:
        return GeneralSolutionConstants(float(A), float(p * z**2 / a3), float(q * z**2))
    if branch is Branch.TIMELIKE_DOMINANT:
        b_cos, b_sin = p * z / a.mu, q * z
        B = math.hypot(b_cos, b_sin)
        C = math.atan2(b_sin, b_cos) % (2 * math.pi) if B > 0 else 0.0
        return GeneralSolutionConstants(float(A), B, C)

    along, across = p * z / a.mu, q * z
    if along == 0 and across == 0:
        return GeneralSolutionConstants(float(A), 0.0, 0.0)
    conjugate = abs(across) > abs(along)
    if conjugate:
        along, across = across, along
    if abs(across) >= abs(along) * (1 - 1e-12):
        raise FactorizationError("x0 lies on an asymptotic direction of the hyperbolic sector")
    B = math.copysign(math.sqrt(along**2 - across**2), along)
    return GeneralSolutionConstants(float(A), B, math.atanh(across / along), conjugate)
