"""Quadrature on SL(2, R) in KAK coordinates.

Haar measure is normalized as ``dg = sinh(t) dk1 dt dk2`` with ``vol(K) = 1``
where ``g = rotation(th1) a_t rotation(th2)``. Radial integrals use composite
Gauss-Legendre on ``[0, t_max]``; the mass beyond ``t_max`` is bounded in
closed form from a caller-supplied envelope ``|f(t)| <= A e^{-lam t}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import DivergenceError, DomainError, ResolutionError, UncertifiedTailError
from .group import GroupElement, a_t_array, rotation_array

EPS = np.finfo(float).eps


@dataclass(frozen=True)
class QuadratureSpec:
    radial_panel_count: int = 32
    t_max: float = 40.0
    nodes_per_panel: int = 16
    angular_nodes: int = 16
    tail_exponent: float | None = None
    tail_constant: float = 1.0

    def __post_init__(self):
        if self.radial_panel_count < 8:
            raise DomainError("radial_panel_count must be >= 8")
        if self.nodes_per_panel < 4:
            raise DomainError("nodes_per_panel must be >= 4")
        if self.angular_nodes < 8:
            raise DomainError("angular_nodes must be >= 8")
        if not self.t_max > 0:
            raise DomainError("t_max must be positive")
        if self.tail_constant < 0:
            raise DomainError("tail_constant must be nonnegative")


@dataclass(frozen=True)
class IntegralResult:
    value: float | complex
    discretization_error_estimate: float
    tail_bound: float


@lru_cache(maxsize=None)
def _gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def composite_nodes(lo: float, hi: float, panels: int, order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = _gauss_legendre(order)
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _fsum(values: np.ndarray) -> float | complex:
    values = np.asarray(values).ravel()
    if np.iscomplexobj(values):
        return complex(math.fsum(values.real), math.fsum(values.imag))
    return math.fsum(values)


def sinh_tail(lam: float, A: float, T: float) -> float:
    """``int_T^inf sinh(t) A e^{-lam t} dt`` in closed form (requires ``lam > 1``)."""
    if lam <= 1:
        raise DivergenceError(f"tail decay e^(-{lam} t) is not integrable against sinh(t)")
    return 0.5 * A * (math.exp((1 - lam) * T) / (lam - 1) - math.exp(-(1 + lam) * T) / (lam + 1))


def cutoff_for_tail(lam: float, A: float, tol: float) -> float:
    """Smallest ``T >= 1`` with ``sinh_tail(lam, A, T) <= tol`` (via the bound ``A e^{(1-lam)T} / (2(lam-1))``)."""
    if lam <= 1:
        raise DivergenceError(f"tail decay e^(-{lam} t) is not integrable against sinh(t)")
    if A == 0:
        return 1.0
    return max(1.0, math.log(A / (2 * (lam - 1) * tol)) / (lam - 1))


def _radial_sum(f, spec: QuadratureSpec, panels: int):
    t, w = composite_nodes(0.0, spec.t_max, panels, spec.nodes_per_panel)
    terms = w * np.sinh(t) * f(t)
    return _fsum(terms), float(np.sum(np.abs(terms)))


def _as_vectorized(f: Callable) -> Callable:
    def g(t):
        try:
            out = f(t)
        except TypeError:
            out = None
        if np.shape(out) != np.shape(t):
            out = np.array([f(float(x)) for x in t])
        return out

    return g


def integrate_radial(f: Callable, spec: QuadratureSpec) -> IntegralResult:
    """``int_0^inf sinh(t) f(t) dt``: quadrature on ``[0, t_max]`` plus a certified tail bound.

    ``spec.tail_exponent`` and ``spec.tail_constant`` describe an envelope
    ``|f(t)| <= tail_constant e^{-tail_exponent t}`` valid for ``t >= t_max``.
    The value is the refined (doubled-panel) sum; the error estimate is the
    change under that refinement, floored at the round-off level.
    """
    if spec.tail_exponent is None:
        raise UncertifiedTailError("integrate_radial needs a decay envelope (tail_exponent)")
    tail = sinh_tail(spec.tail_exponent, spec.tail_constant, spec.t_max)
    f = _as_vectorized(f)
    coarse, _ = _radial_sum(f, spec, spec.radial_panel_count)
    fine, mag = _radial_sum(f, spec, 2 * spec.radial_panel_count)
    err = max(abs(fine - coarse), 64 * EPS * mag)
    return IntegralResult(fine, err, tail)


def lp_norm_numeric(k: int, p: float, spec: QuadratureSpec | None = None, tol: float = 1e-14) -> IntegralResult:
    """``||c_k||_p`` from the radial integral of ``cosh(t/2)^{-pk}`` (``|c_k|`` is bi-K-invariant).

    Uses ``cosh(t/2)^{-q} <= 2^q e^{-q t/2}`` as the tail envelope; when no spec
    is given the cutoff is chosen so that the tail is below ``tol``.
    """
    if p < 1:
        raise DomainError("p must be >= 1")
    q = p * k
    if q <= 2:
        raise DivergenceError(f"c_{k} is not in L^{p}: need p*k > 2")
    lam, A = q / 2.0, 2.0 ** q
    if spec is None:
        T = cutoff_for_tail(lam, A, tol)
        spec = QuadratureSpec(radial_panel_count=max(32, int(math.ceil(T / 2))), t_max=T)
    spec = replace(spec, tail_exponent=lam, tail_constant=A)
    res = integrate_radial(lambda t: np.cosh(t / 2) ** (-q), spec)
    I = res.value
    val = I ** (1.0 / p)
    err = res.discretization_error_estimate * val / (p * I)
    tail = (I + res.tail_bound) ** (1.0 / p) - val
    return IntegralResult(val, err, max(tail, 0.0))


def kak_matrices(theta1: np.ndarray, t: np.ndarray, theta2: np.ndarray) -> np.ndarray:
    """Matrices ``r(theta1) a_t r(theta2)`` on the full tensor grid, shape ``(n1, nt, n2, 2, 2)``."""
    k1 = rotation_array(theta1)[:, None, None]
    a = a_t_array(t)[None, :, None]
    k2 = rotation_array(theta2)[None, None, :]
    return k1 @ a @ k2


def integrate_group(f: Callable, spec: QuadratureSpec, envelope: tuple[float, float] | None = None) -> IntegralResult:
    """Haar integral of ``f`` over SL(2, R).

    ``f`` maps an array of matrices of shape ``(n, 2, 2)`` to ``n`` values.
    ``envelope = (const, kappa)`` asserts ``|f(g)| <= const (2/||g||_F)^kappa``,
    which on ``a_t`` gives ``const 2^kappa e^{-kappa t/2}`` and hence the tail.
    """
    if envelope is None:
        raise UncertifiedTailError("integrate_group needs a decay envelope (const, kappa)")
    const, kappa = envelope
    tail = sinh_tail(kappa / 2.0, const * 2.0 ** kappa, spec.t_max)
    M = spec.angular_nodes
    theta = 2 * np.pi * np.arange(M) / M

    def radial_total(panels):
        t, w = composite_nodes(0.0, spec.t_max, panels, spec.nodes_per_panel)
        mats = kak_matrices(theta, t, theta)
        vals = np.asarray(f(mats.reshape(-1, 2, 2))).reshape(M, len(t), M)
        terms = vals * (w * np.sinh(t))[None, :, None] / (M * M)
        return _fsum(terms), float(np.sum(np.abs(terms)))

    coarse, _ = radial_total(spec.radial_panel_count)
    fine, mag = radial_total(2 * spec.radial_panel_count)
    err = max(abs(fine - coarse), 64 * EPS * mag)
    return IntegralResult(fine, err, tail)


def _unipotent_orbit(g: GroupElement, x: np.ndarray) -> np.ndarray:
    m = np.empty(x.shape + (2, 2))
    m[..., 0, 0] = g.a + x * g.c
    m[..., 0, 1] = g.b + x * g.d
    m[..., 1, 0] = g.c
    m[..., 1, 1] = g.d
    return m


def constant_term(f: Callable, g: GroupElement, width: float, nodes: int) -> complex:
    """``(1/width) int_0^width f(n(x) g) dx`` by composite Gauss-Legendre.

    ``nodes`` is the total node budget, split into panels of at most 16 points.
    """
    if nodes < 4:
        raise ResolutionError("constant_term needs at least 4 nodes")
    if not width > 0:
        raise DomainError("width must be positive")
    panels = -(-nodes // 16)
    order = nodes // panels
    x, w = composite_nodes(0.0, width, panels, order)
    vals = np.asarray(f(_unipotent_orbit(g, x)))
    return complex(_fsum(w * vals)) / width
