"""Structure constants, Lie bracket and Killing form of su(2) and su(1,1).

Algebra elements are represented in R^3 by their coefficients a_j in the
generator basis S_1, S_2, S_3 ("adjoint picture"). Every function here is
pure; the ``*_array`` variants broadcast over leading axes of shape (..., 3).
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np


class AlgebraKind(str, Enum):
    """The two supported Lie algebras."""

    SU2 = "su2"
    SU11 = "su11"

    @classmethod
    def parse(cls, value: "str | AlgebraKind") -> "AlgebraKind":
        """Accept an AlgebraKind or its case-insensitive string tag."""
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ValueError(f"Unknown algebra: {value!r}. Must be su2 or su11") from None


# Non-vanishing structure constants, 1-based (j, m, l) -> value.
_NONZERO = {
    AlgebraKind.SU2: {
        (1, 2, 3): 1, (2, 3, 1): 1, (3, 1, 2): 1,
        (1, 3, 2): -1, (2, 1, 3): -1, (3, 2, 1): -1,
    },
    AlgebraKind.SU11: {
        (1, 2, 3): 1, (3, 2, 1): 1, (1, 3, 2): 1,
        (2, 1, 3): -1, (2, 3, 1): -1, (3, 1, 2): -1,
    },
}

# Diagonal metric of the closed-form Killing form, <a|b> = sum_j g_j a_j b_j.
KILLING_METRIC = {
    AlgebraKind.SU2: np.array([-2.0, -2.0, -2.0]),
    AlgebraKind.SU11: np.array([-2.0, -2.0, 2.0]),
}

# Sign taking the double contraction of structure constants to the closed form.
# With the same sign: 2 x*(x*y) = s (<x|y> x - <x|x> y).
# Raw contraction: su(2) gives +2 sum a_j b_j, su(1,1) gives -2a1b1 - 2a2b2 + 2a3b3.
CONTRACTION_SIGN = {
    AlgebraKind.SU2: -1.0,
    AlgebraKind.SU11: 1.0,
}


def _build_table(kind: AlgebraKind) -> np.ndarray:
    table = np.zeros((3, 3, 3))
    for (j, m, l), value in _NONZERO[kind].items():
        table[j - 1, m - 1, l - 1] = value
    table.setflags(write=False)
    return table


_TABLES = {kind: _build_table(kind) for kind in AlgebraKind}


def structure_constants(kind: AlgebraKind) -> np.ndarray:
    """Return the 3x3x3 table omega[j, m, l] (0-based, read-only)."""
    return _TABLES[AlgebraKind.parse(kind)]


@dataclass(frozen=True)
class AdjointVector:
    """Coefficients (a1, a2, a3) of an algebra element."""

    a1: float
    a2: float
    a3: float

    def __post_init__(self):
        for name in ("a1", "a2", "a3"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"AdjointVector component {name} is not finite: {value}")
            object.__setattr__(self, name, value)

    @classmethod
    def of(cls, value) -> "AdjointVector":
        """Build from an AdjointVector or any length-3 sequence."""
        if isinstance(value, cls):
            return value
        arr = np.asarray(value, dtype=float)
        if arr.shape != (3,):
            raise ValueError(f"Expected 3 components, got shape {arr.shape}")
        return cls(*arr.tolist())

    @property
    def components(self) -> np.ndarray:
        return np.array([self.a1, self.a2, self.a3])

    @property
    def z(self) -> float:
        """Transverse magnitude sqrt(a1^2 + a2^2)."""
        return math.hypot(self.a1, self.a2)

    @property
    def lam(self) -> float:
        """SU(2) length sqrt(z^2 + a3^2)."""
        return math.hypot(self.z, self.a3)

    @property
    def mu(self) -> float:
        """SU(1,1) length sqrt(|z^2 - a3^2|)."""
        return math.sqrt(abs(self.a1**2 + self.a2**2 - self.a3**2))

    def to_list(self) -> list[float]:
        return [self.a1, self.a2, self.a3]


def bracket_array(kind: AlgebraKind, a, b) -> np.ndarray:
    """(a x b)_l = sum_jm a_j b_m omega_jml, broadcasting over leading axes."""
    table = structure_constants(kind)
    return np.einsum("...j,...m,jml->...l", np.asarray(a, dtype=float), np.asarray(b, dtype=float), table)


def bracket(kind: AlgebraKind, a, b) -> AdjointVector:
    """Lie bracket of two algebra elements."""
    result = bracket_array(kind, AdjointVector.of(a).components, AdjointVector.of(b).components)
    return AdjointVector.of(result)


def bracket_matrix(kind: AlgebraKind, h) -> np.ndarray:
    """Matrix L(h) with L(h) @ a == h x a, shape (..., 3, 3)."""
    table = structure_constants(kind)
    return np.einsum("...j,jml->...lm", np.asarray(h, dtype=float), table)


def killing_array(kind: AlgebraKind, a, b) -> np.ndarray:
    """Closed-form Killing form, broadcasting over leading axes."""
    metric = KILLING_METRIC[AlgebraKind.parse(kind)]
    return np.sum(metric * np.asarray(a, dtype=float) * np.asarray(b, dtype=float), axis=-1)


def killing(kind: AlgebraKind, a, b) -> float:
    """Killing form <a|b>: -2 sum a_j b_j for su(2), -2a1b1 - 2a2b2 + 2a3b3 for su(1,1)."""
    return float(killing_array(kind, AdjointVector.of(a).components, AdjointVector.of(b).components))


def killing_from_structure(kind: AlgebraKind, a, b) -> float:
    """Killing form from the double contraction of the structure constants.

    Computes -sum_mn (sum_j w_jmn a_j)(sum_l w_lnm b_l) and normalises its sign
    with CONTRACTION_SIGN so that it matches the closed form.
    """
    kind = AlgebraKind.parse(kind)
    table = structure_constants(kind)
    left = np.einsum("j,jmn->mn", np.asarray(a, dtype=float), table)
    right = np.einsum("l,lnm->nm", np.asarray(b, dtype=float), table)
    contraction = -np.einsum("mn,nm->", left, right)
    return float(CONTRACTION_SIGN[kind] * contraction)
