"""Non-vanishing certificates for P_{Gamma(N)}(c_k).

A certificate pairs a bi-K-invariant ball ``C = {||g|| <= e^{T/2}}`` carrying
more than half of ``||c_k||_1`` with an exhaustive check that Gamma(N) meets
``C C^-1`` only in the identity; together they force the series to be
nonzero.

Since ``int_{t <= T} sinh(t) cosh(t/2)^{-k} dt = 4/(k-2) (1 - cosh(T/2)^{2-k})``
the half-mass radius is ``T(k) = 2 arccosh(2^{1/(k-2)})``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .arithmetic import LatticeTriviality, cc_inverse_trivial, gamma_ball
from .errors import CapacityError, NotIntegrableError
from .group import GroupElement, a_t, group_norm_array, multiply, rotation, unipotent
from .poincare import eval_truncated
from .quadrature import QuadratureSpec, integrate_radial

MARGIN = 1e-9
MAX_LEVEL = 500


def probe_points() -> list[GroupElement]:
    return [GroupElement(1, 0, 0, 1), a_t(0.5), multiply(unipotent(0.5), rotation(1.0 / 3.0))]


@dataclass(frozen=True)
class NonvanishingCertificate:
    k: int
    N: int
    T: float
    mass_inside: float
    mass_total: float
    lattice_trivial: bool
    witness: GroupElement | None
    verified: bool
    probes: tuple = ()
    adelic: dict | None = field(default=None)

    def to_dict(self) -> dict:
        out = {
            "k": self.k,
            "N": self.N,
            "T": self.T,
            "mass_inside": self.mass_inside,
            "mass_total": self.mass_total,
            "lattice_trivial": self.lattice_trivial,
            "witness": None if self.witness is None else [int(x) for x in self.witness.entries()],
            "verified": self.verified,
            "probes": list(self.probes),
        }
        if self.adelic is not None:
            out["adelic"] = self.adelic
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _check_weight(k: int) -> None:
    if int(k) != k or k <= 2:
        raise NotIntegrableError(f"c_{k} is not in L^1; certificates need k >= 3")


def mass_radius(k: int) -> float:
    _check_weight(k)
    return 2.0 * math.acosh(2.0 ** (1.0 / (k - 2)))


def mass_total(k: int) -> float:
    _check_weight(k)
    return 4.0 / (k - 2)


def mass_within(k: int, T: float) -> float:
    """``int_0^T sinh(t) cosh(t/2)^{-k} dt`` by quadrature.

    The integrand is positive, so the result is capped at the full mass to keep
    round-off from pushing it past ``mass_total`` for large ``T``.
    """
    spec = QuadratureSpec(radial_panel_count=8, t_max=T, tail_exponent=k / 2.0, tail_constant=2.0 ** k)
    value = float(integrate_radial(lambda t: np.cosh(t / 2) ** (-k), spec).value)
    return min(value, mass_total(k))


def _probe_records(k: int, N: int, radius: float) -> tuple:
    out = []
    for g in probe_points():
        tv = eval_truncated(k, N, g, radius)
        out.append(tv.to_dict())
    return tuple(out)


def certificate(k: int, N: int, probe_radius: float | None = None) -> NonvanishingCertificate:
    """Certificate for ``(k, N)``; ``probe_radius`` adds truncated evaluations at the probe set."""
    T = mass_radius(k) + MARGIN
    inside = mass_within(k, T)
    total = mass_total(k)
    lattice = cc_inverse_trivial(N, T)
    probes = _probe_records(k, N, probe_radius) if probe_radius else ()
    return NonvanishingCertificate(
        k=int(k),
        N=int(N),
        T=T,
        mass_inside=inside,
        mass_total=total,
        lattice_trivial=lattice.trivial,
        witness=lattice.witness,
        verified=bool(inside > total / 2 and lattice.trivial),
        probes=probes,
    )


@dataclass(frozen=True)
class LevelThreshold:
    k: int
    n0: int
    T: float
    rejected: tuple[tuple[int, GroupElement], ...]


def level_threshold(k: int, max_level: int = MAX_LEVEL) -> LevelThreshold:
    """Least N whose lattice check passes at the half-mass radius, with witnesses for smaller N."""
    T = mass_radius(k) + MARGIN
    rejected = []
    for N in range(1, max_level + 1):
        check = cc_inverse_trivial(N, T)
        if check.trivial:
            return LevelThreshold(int(k), N, T, tuple(rejected))
        rejected.append((N, check.witness))
    raise CapacityError(f"no level up to {max_level} passes for k = {k}")


def confirm_nonvanishing(cert: NonvanishingCertificate, radii=(40.0, 80.0, 160.0)) -> dict | None:
    """First probe/radius with ``|value| > tail_bound``, or ``None``."""
    for R in radii:
        for g in probe_points():
            tv = eval_truncated(cert.k, cert.N, g, R)
            if abs(tv.value) > tv.tail_bound:
                return tv.to_dict()
    return None


def _factorize(n: int) -> dict[int, int]:
    out, p = {}, 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def local_supports(N: int) -> list[dict]:
    """Support of ``f_p`` at each prime dividing N: the level-``p^v`` principal congruence subgroup.

    ``volume`` is the measure of the support relative to SL(2, Z_p),
    ``1 / (p^{3v} (1 - p^-2))``; these factors appear on both sides of the mass
    inequality and cancel.
    """
    return [
        {"prime": p, "exponent": v, "support": f"K_{p}({p}^{v})", "volume": 1.0 / (p ** (3 * v) * (1 - p ** -2))}
        for p, v in sorted(_factorize(N).items())
    ]


def _adelic_lattice(N: int, T: float) -> LatticeTriviality:
    # SL(2, Q) meets prod_p supp(f_p) in the integral matrices that are
    # congruent to I mod p^v for every p^v || N; test that prime by prime.
    radius = math.exp(T) + math.exp(-T)
    ball = gamma_ball(1, radius).entries
    keep = np.ones(len(ball), dtype=bool)
    for loc in local_supports(N):
        q = loc["prime"] ** loc["exponent"]
        keep &= ((ball - np.array([1, 0, 0, 1])) % q == 0).all(axis=1)
    nontrivial = ball[keep & ~(ball == np.array([1, 0, 0, 1])).all(axis=1)]
    if len(nontrivial):
        norms = group_norm_array(nontrivial.reshape(-1, 2, 2).astype(float))
        bad = np.flatnonzero(norms <= math.exp(T))
        if len(bad):
            best = bad[np.argmin(norms[bad])]
            return LatticeTriviality(False, GroupElement(*(int(x) for x in nontrivial[best])), T, radius)
    return LatticeTriviality(True, None, T, radius)


def adelic_reduce(k: int, N: int, probe_radius: float | None = None) -> NonvanishingCertificate:
    """Certificate for the adelic series with ``f_p = 1_{K_p(N)}`` at ``p | N`` and ``1_{SL2(Z_p)}`` elsewhere.

    The lattice condition is evaluated through the local supports on SL(2, Z)
    rather than through Gamma(N) directly; the archimedean mass condition is
    the same as for :func:`certificate` because the local volumes cancel.
    """
    T = mass_radius(k) + MARGIN
    inside = mass_within(k, T)
    total = mass_total(k)
    lattice = _adelic_lattice(int(N), T)
    probes = _probe_records(k, N, probe_radius) if probe_radius else ()
    annotation = {"primes": [loc["prime"] for loc in local_supports(N)], "local_supports": local_supports(N)}
    return NonvanishingCertificate(
        k=int(k),
        N=int(N),
        T=T,
        mass_inside=inside,
        mass_total=total,
        lattice_trivial=lattice.trivial,
        witness=lattice.witness,
        verified=bool(inside > total / 2 and lattice.trivial),
        probes=probes,
        adelic=annotation,
    )
