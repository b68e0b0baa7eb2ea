"""Principal congruence subgroups Gamma(N) and exhaustive Frobenius-ball enumeration.

Gamma(N) is taken literally as the integer unimodular matrices congruent to
the identity entrywise mod N, so ``-I`` belongs to Gamma(1) and Gamma(2) and
nothing is quotiented by +-I.

The enumeration scans every triple ``(a, b, c)`` in the congruence classes
``(1, 0, 0) mod N`` with ``a^2 + b^2 + c^2 <= R^2`` and solves ``ad - bc = 1``
for ``d``; together with the ``a = 0`` branch (``bc = -1``, ``d`` free) this
visits every element of the ball, so the result is exhaustive by
construction.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import CapacityError, DomainError, WidenRadiusError
from .group import GroupElement, frobenius_norm, group_norm, group_norm_array

DEFAULT_CAP = 10**7
SQRT2 = math.sqrt(2.0)


def scan_cap() -> int:
    env = os.environ.get("POINCARE_LAB_CAP")
    return int(env) if env else DEFAULT_CAP


@dataclass(frozen=True)
class CongruenceLevel:
    N: int

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise DomainError(f"level must be an integer >= 1, got {self.N}")

    def contains(self, g: GroupElement) -> bool:
        if not g.is_integral():
            return False
        a, b, c, d = (int(round(x)) for x in g.entries())
        N = self.N
        return a * d - b * c == 1 and (a - 1) % N == 0 and b % N == 0 and c % N == 0 and (d - 1) % N == 0


def _level(level) -> CongruenceLevel:
    return level if isinstance(level, CongruenceLevel) else CongruenceLevel(int(level))


@dataclass(frozen=True)
class LatticeBall:
    level: CongruenceLevel
    radius: float
    entries: np.ndarray  # (n, 4) int64, lexicographically sorted
    exhaustive: bool = True

    @property
    def elements(self) -> list[GroupElement]:
        return [GroupElement(*(int(x) for x in row)) for row in self.entries]

    @property
    def matrices(self) -> np.ndarray:
        return self.entries.reshape(-1, 2, 2).astype(float)

    def __len__(self):
        return len(self.entries)

    def to_dict(self) -> dict:
        return {
            "N": self.level.N,
            "radius": self.radius,
            "count": len(self),
            "elements": self.entries.tolist(),
            "exhaustive": self.exhaustive,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _residues(lo: int, hi: int, r: int, N: int) -> np.ndarray:
    start = lo + ((r - lo) % N)
    return np.arange(start, hi + 1, N, dtype=np.int64)


def scan_size(N: int, radius: float) -> int:
    R = int(math.floor(radius))
    return len(_residues(-R, R, 1, N)) * len(_residues(-R, R, 0, N)) ** 2


@lru_cache(maxsize=64)
def _enumerate(N: int, radius: float, cap: int) -> np.ndarray:
    R = int(math.floor(radius))
    R2 = radius * radius + 1e-9
    A = _residues(-R, R, 1, N)
    B = _residues(-R, R, 0, N)
    C = B
    candidates = len(A) * len(B) * len(C)
    if candidates > cap:
        raise CapacityError(
            f"scan of {candidates} candidates exceeds cap {cap} (N={N}, radius={radius})",
            candidates=candidates,
            cap=cap,
        )
    Dres = _residues(-R, R, 1, N)
    bb, cc = np.meshgrid(B, C, indexing="ij")
    bb, cc = bb.ravel(), cc.ravel()
    found = []
    for a in A:
        rest = R2 - a * a - bb * bb - cc * cc
        ok = rest >= 0
        b, c, rest = bb[ok], cc[ok], rest[ok]
        if a == 0:
            sel = b * c == -1
            for bi, ci, ri in zip(b[sel], c[sel], rest[sel]):
                ds = Dres[Dres * Dres <= ri]
                found.extend((0, int(bi), int(ci), int(d)) for d in ds)
            continue
        num = 1 + b * c
        div = num % a == 0
        d = num[div] // a
        b, c, rest = b[div], c[div], rest[div]
        keep = ((d - 1) % N == 0) & (d * d <= rest)
        found.extend(zip([int(a)] * int(keep.sum()), b[keep].tolist(), c[keep].tolist(), d[keep].tolist()))
    out = np.array(sorted(found), dtype=np.int64).reshape(-1, 4)
    out.setflags(write=False)
    return out


def gamma_ball(level, radius: float, cap: int | None = None) -> LatticeBall:
    """Every element of Gamma(N) with Frobenius norm <= ``radius``."""
    level = _level(level)
    if radius < 0:
        raise DomainError("radius must be nonnegative")
    cap = scan_cap() if cap is None else cap
    return LatticeBall(level, float(radius), _enumerate(level.N, float(radius), cap), True)


def quotient_norm(level, g: GroupElement, search_radius: float, cap: int | None = None) -> float:
    """``inf_gamma ||gamma g||`` over Gamma(N).

    If the best value found is ``m``, every gamma with ``||gamma g|| <= m``
    has ``||gamma||_F <= m ||g||_F`` (since ``||XY||_F <= ||X||_op ||Y||_F``
    and ``||g^-1||_F = ||g||_F``); the search is certified once
    ``search_radius`` reaches that value.
    """
    level = _level(level)
    ball = gamma_ball(level, max(search_radius, 0.0), cap)
    best = group_norm(g)
    if len(ball):
        best = min(best, float(np.min(group_norm_array(ball.matrices @ g.to_array()))))
    needed = best * frobenius_norm(g)
    if search_radius < needed * (1 - 1e-12):
        raise WidenRadiusError(
            f"search radius {search_radius} does not certify the minimum; use at least {needed:.6g}",
            suggested_radius=needed,
        )
    return best


def certified_search_radius(g: GroupElement) -> float:
    """A radius that always passes the :func:`quotient_norm` sufficiency check."""
    return max(SQRT2, group_norm(g) * frobenius_norm(g) * (1 + 1e-9))


def _nontrivial(ball: LatticeBall) -> np.ndarray:
    e = ball.entries
    identity = (e[:, 0] == 1) & (e[:, 1] == 0) & (e[:, 2] == 0) & (e[:, 3] == 1)
    return e[~identity]


def min_nontrivial_opnorm(level, search_radius: float, cap: int | None = None) -> float | None:
    """Smallest operator norm of a nontrivial element of the ball.

    ``None`` certifies that every nontrivial element of Gamma(N) has
    Frobenius norm greater than ``search_radius``.
    """
    if search_radius < SQRT2:
        raise DomainError("search_radius must be >= sqrt(2)")
    rest = _nontrivial(gamma_ball(level, search_radius, cap))
    if not len(rest):
        return None
    return float(np.min(group_norm_array(rest.reshape(-1, 2, 2).astype(float))))


@dataclass(frozen=True)
class LatticeTriviality:
    """Outcome of the test ``Gamma(N) meets C C^-1 only in the identity``."""

    trivial: bool
    witness: GroupElement | None
    T: float
    frobenius_radius: float

    def __bool__(self):
        return self.trivial


def cc_inverse_trivial(level, T: float, cap: int | None = None) -> LatticeTriviality:
    """Decide whether Gamma(N) meets ``{||g|| <= e^T}`` only in the identity.

    With ``C = {||g|| <= e^{T/2}}`` norm symmetry and submultiplicativity give
    ``C C^-1 <= {||g|| <= e^T}``, and ``||g|| <= e^T`` forces
    ``||g||_F <= e^T + e^-T``, so the Frobenius ball of that radius is searched.
    The reported witness is the violating element of least operator norm.
    """
    if not T > 0:
        raise DomainError("T must be positive")
    radius = math.exp(T) + math.exp(-T)
    rest = _nontrivial(gamma_ball(level, radius, cap))
    if len(rest):
        norms = group_norm_array(rest.reshape(-1, 2, 2).astype(float))
        bad = np.flatnonzero(norms <= math.exp(T))
        if len(bad):
            best = bad[np.argmin(norms[bad])]
            return LatticeTriviality(False, GroupElement(*(int(x) for x in rest[best])), T, radius)
    return LatticeTriviality(True, None, T, radius)
