"""Restricted root data: rho, the KAK Haar density and the integrability threshold.

Root functionals are coefficient vectors in the simple-root basis, stored as
``Fraction`` so that ``rho`` and its values on the dual basis ``H_1..H_r``
(``alpha_i(H_j) = delta_ij``) are exact. A point ``H`` of the Cartan subspace
is given by its coordinates ``(t_1, ..., t_r)`` in that dual basis, so a
functional with coefficients ``c`` takes the value ``sum(c_j t_j)`` at ``H``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import ConsistencyError, DomainError, InvalidSpecError
from .group import a_t, group_norm


def _frac(x) -> Fraction:
    if isinstance(x, float):
        return Fraction(x).limit_denominator(10**9)
    return Fraction(x)


@dataclass(frozen=True)
class RootSystemSpec:
    positive_roots: tuple[tuple[Fraction, ...], ...]
    multiplicities: tuple[int, ...]
    rank: int
    rho: tuple[Fraction, ...] = field(init=False)
    dual_basis_labels: tuple[str, ...] = field(init=False)

    def __post_init__(self):
        roots = tuple(tuple(_frac(c) for c in r) for r in self.positive_roots)
        mults = tuple(int(m) for m in self.multiplicities)
        if self.rank < 1:
            raise InvalidSpecError("rank must be >= 1")
        if len(roots) != len(mults):
            raise InvalidSpecError("one multiplicity per positive root is required")
        if any(len(r) != self.rank for r in roots):
            raise InvalidSpecError("root coefficient vectors must have length rank")
        if any(m < 1 for m in mults):
            raise InvalidSpecError("multiplicities must be >= 1")
        for i in range(self.rank):
            unit = tuple(Fraction(int(i == j)) for j in range(self.rank))
            if unit not in roots:
                raise InvalidSpecError(f"simple root alpha_{i + 1} missing from positive roots")
        rho = tuple(
            sum((m * r[j] for r, m in zip(roots, mults)), Fraction(0)) / 2 for j in range(self.rank)
        )
        object.__setattr__(self, "positive_roots", roots)
        object.__setattr__(self, "multiplicities", mults)
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "dual_basis_labels", tuple(f"H_{j + 1}" for j in range(self.rank)))

    def evaluate(self, functional: Sequence, H: Sequence) -> Fraction:
        """Value of a coefficient vector at ``H`` given in dual-basis coordinates."""
        return sum((_frac(c) * _frac(x) for c, x in zip(functional, H)), Fraction(0))

    def dual_vector(self, j: int) -> tuple[Fraction, ...]:
        return tuple(Fraction(int(j == k)) for k in range(self.rank))

    def rho_at(self, j: int) -> Fraction:
        """``rho(H_j)``."""
        return self.evaluate(self.rho, self.dual_vector(j))

    def to_json(self) -> str:
        doc = {
            "rank": self.rank,
            "positive_roots": [[_json_num(c) for c in r] for r in self.positive_roots],
            "multiplicities": list(self.multiplicities),
        }
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> "RootSystemSpec":
        doc = json.loads(text)
        try:
            return cls(
                positive_roots=[[Fraction(c) if isinstance(c, str) else c for c in r] for r in doc["positive_roots"]],
                multiplicities=doc["multiplicities"],
                rank=int(doc["rank"]),
            )
        except KeyError as exc:
            raise InvalidSpecError(f"missing field {exc}") from None


def _json_num(x: Fraction):
    return x.numerator if x.denominator == 1 else str(x)


@dataclass(frozen=True)
class NormSandwich:
    """Constants with ``C a^{c rho} <= ||a|| <= D a^{d rho}`` on the closed chamber."""

    c: float
    C: float
    d: float
    D: float

    def __post_init__(self):
        if min(self.c, self.C, self.d, self.D) <= 0:
            raise InvalidSpecError("sandwich constants must be positive")
        if self.c > self.d:
            raise InvalidSpecError("need c <= d")

    def check(self, t: float, norm_value: float, rho_value: float, rtol: float = 1e-12) -> bool:
        lower = self.C * math.exp(self.c * rho_value * t)
        upper = self.D * math.exp(self.d * rho_value * t)
        return lower <= norm_value * (1 + rtol) and norm_value <= upper * (1 + rtol)


def build_a1_spec() -> RootSystemSpec:
    """SL(2): one positive root with ``alpha(H_t) = t`` for ``a_t``, multiplicity 1."""
    return RootSystemSpec(positive_roots=[[1]], multiplicities=[1], rank=1)


def build_a2_spec() -> RootSystemSpec:
    return RootSystemSpec(positive_roots=[[1, 0], [0, 1], [1, 1]], multiplicities=[1, 1, 1], rank=2)


def haar_density(spec: RootSystemSpec, H: Sequence[float]) -> float:
    """``prod sinh(alpha(H))^{m(alpha)}`` over positive roots."""
    H = [float(x) for x in np.atleast_1d(H)]
    if len(H) != spec.rank:
        raise DomainError(f"H must have {spec.rank} coordinates")
    if any(x < 0 for x in H):
        raise DomainError(f"H = {H} lies outside the closed positive chamber")
    out = 1.0
    for root, m in zip(spec.positive_roots, spec.multiplicities):
        out *= math.sinh(sum(float(c) * x for c, x in zip(root, H))) ** m
    return out


def integrability_threshold(spec: RootSystemSpec, c: float) -> float:
    """``max_i 1 / (c rho(H_i))``; ``||g||^{-m}`` is Haar integrable for every larger ``m``."""
    if c <= 0:
        raise DomainError("c must be positive")
    vals = [spec.rho_at(i) for i in range(spec.rank)]
    if any(v <= 0 for v in vals):
        raise InvalidSpecError(f"rho(H_i) must be positive, got {vals}")
    # exact in the rho coefficients; only the final division by c is floating point
    return max(float(1 / v) for v in vals) / c


def sl2_norm_sandwich(grid: Sequence[float] | None = None) -> NormSandwich:
    """For the operator norm on SL(2) the sandwich is an equality: ``||a_t|| = e^{t/2} = a_t^rho``."""
    sandwich = NormSandwich(1.0, 1.0, 1.0, 1.0)
    spec = build_a1_spec()
    rho1 = float(spec.rho_at(0))
    if grid is None:
        grid = np.linspace(0.0, 20.0, 201)
    for t in grid:
        if not sandwich.check(float(t), group_norm(a_t(float(t))), rho1):
            raise ConsistencyError(f"norm sandwich fails at t = {t}")
    return sandwich
