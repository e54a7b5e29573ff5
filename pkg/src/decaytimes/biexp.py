"""Exact term algebra for sums of products of complex exponentials.

A :class:`BiExpSum` represents

    f(t_l, t_r) = sum_k c_k * exp(-zl_k * t_l) * exp(-zr_k * t_r)

Every amplitude, survival probability and decay-time density in this package
is of that form, so derivatives and semi-infinite integrals are closed-form
coefficient manipulations rather than numerical approximations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MERGE_TOL = 1e-12


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=complex).reshape(-1)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class BiExpSum:
    coeffs: np.ndarray
    z_left: np.ndarray
    z_right: np.ndarray

    def __post_init__(self):
        c, zl, zr = _frozen(self.coeffs), _frozen(self.z_left), _frozen(self.z_right)
        if not (c.shape == zl.shape == zr.shape):
            raise ValueError("coeffs, z_left and z_right must have equal length")
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "z_left", zl)
        object.__setattr__(self, "z_right", zr)

    # -- construction ---------------------------------------------------
    @classmethod
    def zero(cls) -> "BiExpSum":
        return cls([], [], [])

    @classmethod
    def term(cls, c: complex, z_left: complex, z_right: complex) -> "BiExpSum":
        return cls([c], [z_left], [z_right])

    @classmethod
    def from_terms(cls, terms) -> "BiExpSum":
        terms = list(terms)
        if not terms:
            return cls.zero()
        c, zl, zr = zip(*terms)
        return cls(c, zl, zr)

    def terms(self):
        return list(zip(self.coeffs, self.z_left, self.z_right))

    def __len__(self) -> int:
        return self.coeffs.size

    def __repr__(self) -> str:
        return f"BiExpSum({len(self)} terms)"

    @property
    def is_zero(self) -> bool:
        return len(self) == 0 or not np.any(self.coeffs)

    # -- evaluation ------------------------------------------------------
    def __call__(self, t_l, t_r):
        """Complex value at (t_l, t_r); arrays broadcast against each other."""
        t_l = np.asarray(t_l, dtype=float)
        t_r = np.asarray(t_r, dtype=float)
        out = np.zeros(np.broadcast_shapes(t_l.shape, t_r.shape), dtype=complex)
        for c, zl, zr in zip(self.coeffs, self.z_left, self.z_right):
            out += c * np.exp(-zl * t_l - zr * t_r)
        return out if out.ndim else complex(out)

    def real(self, t_l, t_r):
        v = self(t_l, t_r)
        return np.real(v) if isinstance(v, np.ndarray) else v.real

    def envelope(self, t_l, t_r):
        """sum_k |c_k| exp(-Re zl_k t_l - Re zr_k t_r); dominates |f| pointwise."""
        t_l = np.asarray(t_l, dtype=float)
        t_r = np.asarray(t_r, dtype=float)
        out = np.zeros(np.broadcast_shapes(t_l.shape, t_r.shape))
        for c, zl, zr in zip(self.coeffs, self.z_left, self.z_right):
            out += abs(c) * np.exp(-zl.real * t_l - zr.real * t_r)
        return out if out.ndim else float(out)

    # -- algebra ---------------------------------------------------------
    def __add__(self, other: "BiExpSum") -> "BiExpSum":
        if not isinstance(other, BiExpSum):
            return NotImplemented
        return BiExpSum(
            np.concatenate([self.coeffs, other.coeffs]),
            np.concatenate([self.z_left, other.z_left]),
            np.concatenate([self.z_right, other.z_right]),
        ).simplify()

    def __neg__(self) -> "BiExpSum":
        return BiExpSum(-self.coeffs, self.z_left, self.z_right)

    def __sub__(self, other: "BiExpSum") -> "BiExpSum":
        return self + (-other)

    def __mul__(self, other) -> "BiExpSum":
        if isinstance(other, BiExpSum):
            c = np.multiply.outer(self.coeffs, other.coeffs).ravel()
            zl = np.add.outer(self.z_left, other.z_left).ravel()
            zr = np.add.outer(self.z_right, other.z_right).ravel()
            return BiExpSum(c, zl, zr).simplify()
        if np.isscalar(other):
            return BiExpSum(self.coeffs * other, self.z_left, self.z_right)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other) -> "BiExpSum":
        return self * (1.0 / other)

    def conj(self) -> "BiExpSum":
        return BiExpSum(np.conj(self.coeffs), np.conj(self.z_left), np.conj(self.z_right))

    def swapped(self) -> "BiExpSum":
        """g(t_l, t_r) = f(t_r, t_l)."""
        return BiExpSum(self.coeffs, self.z_right, self.z_left)

    def modsq(self) -> "BiExpSum":
        return (self * self.conj()).simplify()

    def mixed_derivative(self) -> "BiExpSum":
        """d^2 f / dt_l dt_r."""
        return BiExpSum(self.coeffs * self.z_left * self.z_right, self.z_left, self.z_right)

    def sum_derivative(self) -> "BiExpSum":
        """-(d/dt_l + d/dt_r) f."""
        return BiExpSum(self.coeffs * (self.z_left + self.z_right), self.z_left, self.z_right)

    def simplify(self) -> "BiExpSum":
        """Merge terms with coincident exponent pairs and drop vanishing ones.

        Only exact zeros are dropped: discarding small but nonzero terms can
        break the pointwise positivity of a modulus squared in the tails.
        """
        if len(self) == 0:
            return self
        merged: list[list] = []
        for c, zl, zr in zip(self.coeffs, self.z_left, self.z_right):
            for m in merged:
                if abs(m[1] - zl) <= MERGE_TOL and abs(m[2] - zr) <= MERGE_TOL:
                    m[0] += c
                    break
            else:
                merged.append([c, zl, zr])
        return BiExpSum.from_terms(tuple(m) for m in merged if m[0] != 0)

    # -- integration -----------------------------------------------------
    def _check_decaying(self):
        if len(self) and (np.any(self.z_left.real <= 0) or np.any(self.z_right.real <= 0)):
            raise ValueError("non-integrable term: every exponent needs a positive real part")

    def integral(self) -> complex:
        """Closed-form integral over the quadrant [0, inf)^2."""
        self._check_decaying()
        return complex(np.sum(self.coeffs / (self.z_left * self.z_right)))

    def box_integral(self, left_edges, right_edges) -> np.ndarray:
        """Integrals over every cell of the tensor grid left_edges x right_edges.

        Edges may end with ``np.inf``. Returns a complex array of shape
        (len(left_edges) - 1, len(right_edges) - 1).
        """
        self._check_decaying()
        le = np.asarray(left_edges, dtype=float)
        re = np.asarray(right_edges, dtype=float)
        out = np.zeros((le.size - 1, re.size - 1), dtype=complex)
        for c, zl, zr in zip(self.coeffs, self.z_left, self.z_right):
            out += c * np.multiply.outer(_cell_integrals(zl, le), _cell_integrals(zr, re))
        return out


def _cell_integrals(z: complex, edges: np.ndarray) -> np.ndarray:
    # int_a^b exp(-z t) dt = exp(-z a) (1 - exp(-z (b - a))) / z
    a, b = edges[:-1], edges[1:]
    width = b - a
    with np.errstate(invalid="ignore"):
        tail = np.where(np.isinf(width), 1.0 + 0j, -np.expm1(-z * np.where(np.isinf(width), 0.0, width)))
    return np.exp(-z * a) * tail / z


def scales(f: BiExpSum) -> tuple[float, float]:
    """Half the slowest decay rate along each axis.

    Used as the exponential-map scale for quadrature: every term then
    vanishes at u = 0, including slow terms that oscillate.
    """
    if len(f) == 0:
        return 1.0, 1.0
    return 0.5 * float(np.min(f.z_left.real)), 0.5 * float(np.min(f.z_right.real))


# Functional aliases mirroring the operation names used across the package.
def biexp_eval(f: BiExpSum, t_l, t_r):
    if np.any(np.asarray(t_l) < 0) or np.any(np.asarray(t_r) < 0):
        raise ValueError("times must be nonnegative")
    return f(t_l, t_r)


def biexp_modsq(f: BiExpSum) -> BiExpSum:
    return f.modsq()


def biexp_mixed_derivative(f: BiExpSum) -> BiExpSum:
    return f.mixed_derivative()


def biexp_sum_derivative(f: BiExpSum) -> BiExpSum:
    return f.sum_derivative()


def biexp_integral(f: BiExpSum) -> complex:
    return f.integral()
