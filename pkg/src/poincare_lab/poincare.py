"""Truncated Poincare series of c_k over Gamma(N) with certified tails.

    P(g) = sum_{gamma in Gamma(N)} c_k(gamma g)

is truncated to the Frobenius ball ``||gamma||_F <= R``. The neglected terms
are bounded with three facts:

* ``|c_k(h)| = 2^k (||h||_F^2 + 2)^{-k/2} <= (2 / ||h||_F)^k``;
* ``||gamma g||_F >= ||gamma||_F / ||g||``;
* ``#{gamma in SL(2, Z) : ||gamma||_F <= S} <= kappa0 S^2`` for ``S >= sqrt 2``.

Summing over dyadic shells ``2^j R < ||gamma||_F <= 2^{j+1} R`` gives

    tail = kappa0 * 4 * 2^k * ||g||^k * R^{2-k} / (1 - 2^{2-k}),

finite for every ``k >= 3``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .arithmetic import CongruenceLevel, certified_search_radius, gamma_ball, quotient_norm
from .discrete_series import EnvelopingWord, coeff_array, derivative_array
from .errors import ConsistencyError, DomainError, NotIntegrableError
from .group import GroupElement, group_norm, group_norm_array, multiply, rotation
from .quadrature import constant_term

SQRT2 = math.sqrt(2.0)
DEFAULT_KAPPA0 = 20.0
VALIDATION_RADII = (2.0, 4.0, 8.0, 16.0)


@dataclass(frozen=True)
class TailModel:
    """Lattice-count envelope ``#{||gamma||_F <= S} <= kappa0 S^2`` on SL(2, Z).

    Why it holds: fix a first row ``(a, b)``, necessarily primitive. The second
    rows with ``ad - bc = 1`` form one coset of ``Z (a, b)``, i.e. points spaced
    ``r = |(a, b)|`` apart on a line, so at most ``2S/r + 1`` of them lie in the
    disc of radius ``S``. Summing over primitive ``(a, b)`` with ``r <= S`` gives
    :func:`divisor_line_bound`, which behaves like ``(30/pi) S^2 ~ 9.5 S^2``.
    The constant is also checked against exact counts before any tail is issued.
    """

    kappa0: float = DEFAULT_KAPPA0
    radii: tuple[float, ...] = VALIDATION_RADII
    counts: tuple[int, ...] = field(default=(), compare=False)

    def validate(self) -> "TailModel":
        counts = tuple(len(gamma_ball(1, S)) for S in self.radii)
        for S, n in zip(self.radii, counts):
            if n > self.kappa0 * S * S:
                raise ConsistencyError(f"kappa0 = {self.kappa0} fails at S = {S}: {n} lattice points")
        return TailModel(self.kappa0, self.radii, counts)


@lru_cache(maxsize=8)
def validated_tail_model(kappa0: float = DEFAULT_KAPPA0) -> TailModel:
    return TailModel(kappa0).validate()


def divisor_line_bound(S: float) -> float:
    """Upper bound ``sum over primitive (a, b), |(a, b)| <= S of (2S/|(a, b)| + 1)``."""
    R = int(math.floor(S))
    a = np.arange(-R, R + 1)
    aa, bb = np.meshgrid(a, a, indexing="ij")
    r2 = aa * aa + bb * bb
    prim = (np.gcd(aa, bb) == 1) & (r2 <= S * S)
    r = np.sqrt(r2[prim])
    return float(np.sum(2 * S / r + 1))


def tail_bound(k: int, g_norm: float, R: float, kappa0: float = DEFAULT_KAPPA0) -> float:
    if k <= 2:
        raise NotIntegrableError("the shell sum diverges for k <= 2")
    return kappa0 * 4.0 * 2.0 ** k * g_norm ** k * R ** (2 - k) / (1.0 - 2.0 ** (2 - k))


def word_tail_factor(k: int, word: EnvelopingWord, x_norm: float) -> float:
    """Factor turning the value tail into a tail for ``word`` applied to the series.

    For complex ``|s_i| <= rho`` the perturbed argument keeps
    ``|w| >= |w(h)|/2`` once ``e^{n rho ||X||} <= 5/4``, so every term is at
    most ``2^k |c_k(h)|`` there and Cauchy's estimate costs ``rho^{-n}``.
    Left words are right words by ``Ad(x^-1) X``, of norm ``<= ||x||^2``.
    """
    n = len(word)
    if n == 0:
        return 1.0
    scale = x_norm ** 2 if word.side == "left" else 1.0
    rho = math.log(1.25) / (n * scale)
    return 2.0 ** k * rho ** (-n)


@dataclass(frozen=True)
class TruncatedValue:
    value: complex
    tail_bound: float
    term_count: int
    radius: float
    k: int
    N: int
    g: GroupElement

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "N": self.N,
            "g": [float(x) for x in self.g.entries()],
            "radius": self.radius,
            "value_re": self.value.real,
            "value_im": self.value.imag,
            "tail_bound": self.tail_bound,
            "term_count": self.term_count,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


@dataclass(frozen=True)
class Residual:
    """A residual of an exact identity together with what truncation allows."""

    residual: float
    bound: float

    @property
    def within_bound(self) -> bool:
        return self.residual <= self.bound


def _check_args(k: int, R: float, g_norm: float) -> None:
    if int(k) != k or k <= 2:
        raise NotIntegrableError(f"c_{k} is not integrable; the series needs k >= 3")
    if R < SQRT2 * g_norm * (1 - 1e-12):
        raise DomainError(f"radius {R} is below sqrt(2) * ||g|| = {SQRT2 * g_norm}")


def _fsum_complex(values: np.ndarray, axis: int = 0) -> np.ndarray:
    values = np.moveaxis(np.asarray(values), axis, 0)
    flat = values.reshape(values.shape[0], -1)
    out = np.array([complex(math.fsum(col.real), math.fsum(col.imag)) for col in flat.T])
    return out.reshape(values.shape[1:])


def truncated_sum_array(k: int, N: int, points: np.ndarray, R: float, word: EnvelopingWord | None = None) -> np.ndarray:
    """Truncated series (or ``word`` applied to it) at each matrix in ``points``.

    Terms are reduced with ``math.fsum`` in the lexicographic order of the
    enumerated ball, so results do not depend on evaluation order.
    """
    ball = gamma_ball(N, R)
    points = np.asarray(points, dtype=float).reshape(-1, 2, 2)
    if word is None or len(word) == 0:
        terms = coeff_array(k, ball.matrices[:, None] @ points[None])
    else:
        terms = derivative_array(k, word, points, prefix=ball.matrices)
    return _fsum_complex(terms, axis=0)


def eval_truncated(k: int, N: int, g: GroupElement, R: float, kappa0: float = DEFAULT_KAPPA0) -> TruncatedValue:
    level = CongruenceLevel(N)
    gn = group_norm(g)
    _check_args(k, R, gn)
    model = validated_tail_model(kappa0)
    value = complex(truncated_sum_array(k, level.N, g.to_array(), R)[0])
    return TruncatedValue(
        value=value,
        tail_bound=tail_bound(k, gn, R, model.kappa0),
        term_count=len(gamma_ball(level.N, R)),
        radius=float(R),
        k=int(k),
        N=level.N,
        g=g,
    )


def absolute_partial_sums(k: int, N: int, g: GroupElement, radii: Sequence[float]) -> list[float]:
    """``sum |c_k(gamma g)|`` over the balls of the given radii (convergence monitor)."""
    out = []
    for R in radii:
        ball = gamma_ball(N, R)
        out.append(math.fsum(np.abs(coeff_array(k, ball.matrices @ g.to_array()))))
    return out


def weight_equivariance_check(k: int, N: int, g: GroupElement, theta: float, R: float) -> Residual:
    """``P(g r(theta)) = e^{ik theta} P(g)`` up to the two truncation tails."""
    base = eval_truncated(k, N, g, R)
    turned = eval_truncated(k, N, multiply(g, rotation(theta)), R)
    res = abs(turned.value - complex(math.cos(k * theta), math.sin(k * theta)) * base.value)
    return Residual(res, base.tail_bound + turned.tail_bound)


def left_invariance_check(k: int, N: int, gamma0: GroupElement, g: GroupElement, R: float) -> Residual:
    """``P(gamma0 g) = P(g)`` for ``gamma0`` in Gamma(N), up to the two tails."""
    if not CongruenceLevel(N).contains(gamma0):
        raise DomainError(f"{gamma0} is not in Gamma({N})")
    base = eval_truncated(k, N, g, R)
    moved = eval_truncated(k, N, multiply(gamma0, g), R)
    return Residual(abs(moved.value - base.value), base.tail_bound + moved.tail_bound)


def cuspidality_residual(k: int, N: int, g: GroupElement, R: float, nodes: int = 64) -> Residual:
    """Constant term at the cusp at infinity, ``(1/N) int_0^N P(n(x) g) dx``.

    Gamma(N) meets the upper unipotents in ``{n(mN)}``, so the cusp width is N.
    The bound is the largest tail over the orbit segment; the true series has
    constant term zero.
    """
    CongruenceLevel(N)
    _check_args(k, R, group_norm(g))
    # x -> n(x) g is affine and the operator norm is convex: the max is at an endpoint.
    # The shell bound itself only needs R >= 1/sqrt(2), so the orbit may leave the
    # sqrt(2) ||g|| window without invalidating the tail.
    worst = max(group_norm(g), group_norm(multiply(GroupElement(1.0, float(N), 0.0, 1.0), g)))

    def series(mats):
        return truncated_sum_array(k, N, mats, R)

    ct = constant_term(series, g, float(N), nodes)
    return Residual(abs(ct), tail_bound(k, worst, R))


def sup_norm_check(k: int, N: int, sample_points: Sequence[GroupElement], R: float) -> float:
    """``max (|value| + tail)`` over the samples: a certified upper envelope on the samples."""
    if int(k) != k or k <= 2:
        raise NotIntegrableError("sup-norm diagnostic needs k >= 3")
    best = 0.0
    for g in sample_points:
        tv = eval_truncated(k, N, g, R)
        best = max(best, abs(tv.value) + tv.tail_bound)
    return best


def seminorm_estimate(
    k: int,
    N: int,
    word: EnvelopingWord,
    s: float,
    grid: Sequence[GroupElement],
    R: float,
) -> float:
    """Grid estimate of ``sup_x ||x||_{Gamma\\G}^{-s} |u.P(x)|`` including tails.

    The Casselman quotient norm is evaluated with a certified search radius.
    With ``s = 0`` and the empty word this is exactly :func:`sup_norm_check`.
    """
    if not grid:
        raise DomainError("grid must be nonempty")
    if len(word) > 2:
        raise DomainError("seminorm estimates use words of length <= 2")
    best = 0.0
    for x in grid:
        xn = group_norm(x)
        _check_args(k, R, xn)
        val = complex(truncated_sum_array(k, N, x.to_array(), R, word)[0])
        tail = tail_bound(k, xn, R) * word_tail_factor(k, word, xn)
        q = quotient_norm(N, x, certified_search_radius(x)) if s else 1.0
        best = max(best, q ** (-s) * (abs(val) + tail))
    return best
