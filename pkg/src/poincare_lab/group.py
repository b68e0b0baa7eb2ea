"""SL(2, R) kernel: elements, products, the operator norm, Cartan and Iwasawa coordinates.

Conventions used throughout the package:

* ``rotation(theta) = [[cos, -sin], [sin, cos]]``
* ``a_t = diag(e^{t/2}, e^{-t/2})`` so that ``group_norm(a_t) = e^{t/2}``
* ``n(x) = [[1, x], [0, 1]]``

Two complex linear functionals of the entries carry most of the geometry::

    p(g) = (a + d) + i(c - b),   q(g) = (a - d) + i(b + c)

For ``g = rotation(th1) a_t rotation(th2)`` one has
``p = 2 cosh(t/2) e^{i(th1 + th2)}`` and ``q = 2 sinh(t/2) e^{i(th1 - th2)}``,
which gives the Cartan decomposition and the operator norm in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericOverflowError

TWO_PI = 2.0 * math.pi

DET_TOL = 1e-12
DET_RENORMALIZE_TOL = 1e-8
RECOMPOSE_TOL = 1e-10


def _wrap(angle: float) -> float:
    out = math.fmod(angle, TWO_PI)
    if out < 0.0:
        out += TWO_PI
    # fmod of a tiny negative number can land exactly on 2pi after the shift
    return 0.0 if out >= TWO_PI else out


@dataclass(frozen=True)
class GroupElement:
    """A real unimodular 2x2 matrix ``[[a, b], [c, d]]``.

    Entries may be Python ints (lattice elements keep them exact) or floats.
    Float input whose determinant is off by more than ``DET_TOL`` (scaled by
    the magnitude of ``ad`` and ``bc``) but by at most ``DET_RENORMALIZE_TOL``
    is rescaled by ``1/sqrt(det)``; anything further off is rejected.
    """

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        entries = (self.a, self.b, self.c, self.d)
        if not all(math.isfinite(x) for x in entries):
            raise DomainError(f"non-finite entries {entries}")
        if all(isinstance(x, (int, np.integer)) for x in entries):
            if self.a * self.d - self.b * self.c != 1:
                raise DomainError(f"integer matrix {entries} does not have determinant 1")
            return
        ad = self.a * self.d
        bc = self.b * self.c
        scale = 1.0 + abs(ad) + abs(bc)
        err = abs(ad - bc - 1.0)
        if err <= DET_TOL * scale:
            return
        if err <= DET_RENORMALIZE_TOL * scale and ad - bc > 0:
            s = math.sqrt(ad - bc)
            for name, x in zip("abcd", entries):
                object.__setattr__(self, name, float(x) / s)
            return
        raise DomainError(f"determinant {ad - bc!r} is not 1 (entries {entries})")

    @classmethod
    def from_array(cls, m) -> "GroupElement":
        m = np.asarray(m)
        if m.shape == (4,):
            m = m.reshape(2, 2)
        if m.shape != (2, 2):
            raise DomainError(f"expected a 2x2 matrix, got shape {m.shape}")
        vals = [x.item() for x in m.ravel()]
        return cls(*vals)

    def to_array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=float)

    def entries(self) -> tuple:
        return (self.a, self.b, self.c, self.d)

    def is_integral(self) -> bool:
        return all(float(x).is_integer() for x in self.entries())

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return multiply(self, other)

    def __neg__(self) -> "GroupElement":
        return GroupElement(-self.a, -self.b, -self.c, -self.d)


@dataclass(frozen=True)
class CartanCoords:
    theta1: float
    t: float
    theta2: float


@dataclass(frozen=True)
class IwasawaCoords:
    x: float
    y: float
    theta: float


# -- constructors -------------------------------------------------------------

def identity() -> GroupElement:
    return GroupElement(1, 0, 0, 1)


def rotation(theta: float) -> GroupElement:
    c, s = math.cos(theta), math.sin(theta)
    return GroupElement(c, -s, s, c)


def a_t(t: float) -> GroupElement:
    return GroupElement(math.exp(t / 2), 0.0, 0.0, math.exp(-t / 2))


def diag(lam: float) -> GroupElement:
    return GroupElement(lam, 0.0, 0.0, 1.0 / lam)


def unipotent(x: float) -> GroupElement:
    return GroupElement(1.0, x, 0.0, 1.0)


def lower_unipotent(x: float) -> GroupElement:
    return GroupElement(1.0, 0.0, x, 1.0)


def random_element(rng: np.random.Generator, t_max: float = 2.0) -> GroupElement:
    """Random element with Cartan radius uniform in ``[0, t_max]``."""
    th1, th2 = rng.uniform(0.0, TWO_PI, size=2)
    t = rng.uniform(0.0, t_max)
    return recompose_cartan(CartanCoords(th1, t, th2))


# -- group operations ---------------------------------------------------------

def multiply(g: GroupElement, h: GroupElement) -> GroupElement:
    a = g.a * h.a + g.b * h.c
    b = g.a * h.b + g.b * h.d
    c = g.c * h.a + g.d * h.c
    d = g.c * h.b + g.d * h.d
    if not all(math.isfinite(x) for x in (a, b, c, d)):
        raise NumericOverflowError("matrix product overflowed")
    return GroupElement(a, b, c, d)


def inverse(g: GroupElement) -> GroupElement:
    return GroupElement(g.d, -g.b, -g.c, g.a)


def _pq(g: GroupElement) -> tuple[complex, complex]:
    return complex(g.a + g.d, g.c - g.b), complex(g.a - g.d, g.b + g.c)


def group_norm(g: GroupElement) -> float:
    """Largest singular value, computed as ``(|p| + |q|) / 2``."""
    p, q = _pq(g)
    return 0.5 * (abs(p) + abs(q))


def frobenius_norm(g: GroupElement) -> float:
    return math.sqrt(g.a * g.a + g.b * g.b + g.c * g.c + g.d * g.d)


def cartan(g: GroupElement) -> CartanCoords:
    """``g = rotation(theta1) a_t rotation(theta2)`` with ``t >= 0``.

    At ``t = 0`` the fiber is a circle; we return ``theta2 = 0``.
    """
    p, q = _pq(g)
    t = 2.0 * math.asinh(abs(q) / 2.0)
    s = math.atan2(p.imag, p.real)
    if abs(q) <= 1e-15 * abs(p):
        return CartanCoords(_wrap(s), 0.0, 0.0)
    r = math.atan2(q.imag, q.real)
    return CartanCoords(_wrap((s + r) / 2), t, _wrap((s - r) / 2))


def recompose_cartan(coords: CartanCoords) -> GroupElement:
    return multiply(multiply(rotation(coords.theta1), a_t(coords.t)), rotation(coords.theta2))


def iwasawa(g: GroupElement) -> IwasawaCoords:
    """``g = n(x) diag(sqrt(y), 1/sqrt(y)) rotation(theta)``; ``x + iy = g.i``."""
    r2 = g.c * g.c + g.d * g.d
    return IwasawaCoords((g.a * g.c + g.b * g.d) / r2, 1.0 / r2, _wrap(math.atan2(g.c, g.d)))


def recompose_iwasawa(coords: IwasawaCoords) -> GroupElement:
    sy = math.sqrt(coords.y)
    return multiply(multiply(unipotent(coords.x), diag(sy)), rotation(coords.theta))


def mobius(g: GroupElement, z: complex) -> complex:
    return (g.a * z + g.b) / (g.c * z + g.d)


# -- batched helpers on (..., 2, 2) arrays -------------------------------------

def as_matrix_array(elements) -> np.ndarray:
    return np.array([e.to_array() for e in elements], dtype=float).reshape(-1, 2, 2)


def frobenius_sq_array(m: np.ndarray) -> np.ndarray:
    return np.sum(m * m, axis=(-2, -1))


def group_norm_array(m: np.ndarray) -> np.ndarray:
    a, b, c, d = m[..., 0, 0], m[..., 0, 1], m[..., 1, 0], m[..., 1, 1]
    return 0.5 * (np.hypot(a + d, c - b) + np.hypot(a - d, b + c))


def rotation_array(theta: np.ndarray) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.stack([np.stack([c, -s], -1), np.stack([s, c], -1)], -2)


def a_t_array(t: np.ndarray) -> np.ndarray:
    e = np.exp(np.asarray(t, dtype=float) / 2)
    z = np.zeros_like(e)
    return np.stack([np.stack([e, z], -1), np.stack([z, 1 / e], -1)], -2)
