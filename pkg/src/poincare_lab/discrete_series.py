"""Lowest-weight matrix coefficient of the weight-k holomorphic discrete series.

    c_k(g) = 2^k (a + d + i(b - c))^{-k}

``w(g) = a + d + i(b - c)`` is the linear functional ``v* g v`` with
``v = (1, i)``, so ``|w|^2 = ||g||_F^2 + 2`` and
``w(r(th1) g r(th2)) = e^{-i(th1 + th2)} w(g)``; consequently ``c_k`` has
weight ``(k, k)`` under left and right rotations and ``c_k(I) = 1``.

Lie algebra basis: ``H = diag(1, -1)``, ``E = [[0, 1], [0, 0]]``,
``F = [[0, 0], [1, 0]]``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DivergenceError, DomainError, InsufficientSamplesError, WordTooLongError
from .group import GroupElement, as_matrix_array

LIE_BASIS = {
    "H": np.array([[1.0, 0.0], [0.0, -1.0]]),
    "E": np.array([[0.0, 1.0], [0.0, 0.0]]),
    "F": np.array([[0.0, 0.0], [1.0, 0.0]]),
}
MAX_WORD_LENGTH = 4


@dataclass(frozen=True)
class MatrixCoefficientParam:
    k: int

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 2:
            raise DomainError(f"weight must be an integer >= 2, got {self.k}")

    @property
    def normalization(self) -> int:
        return 2 ** self.k

    @property
    def integrable(self) -> bool:
        return self.k >= 3


@dataclass(frozen=True)
class EnvelopingWord:
    """A word ``X_1 X_2 ... X_n`` in the basis letters acting on the given side.

    Right words act by ``d/ds_1 ... d/ds_n f(g e^{s_1 X_1} ... e^{s_n X_n})``,
    left words by ``d/ds_1 ... d/ds_n f(e^{-s_n X_n} ... e^{-s_1 X_1} g)``,
    both at ``s = 0``; these are the right and left regular actions of the
    product ``X_1 ... X_n`` in the enveloping algebra.
    """

    letters: tuple[str, ...] = ()
    side: str = "right"

    def __post_init__(self):
        letters = tuple(self.letters)
        object.__setattr__(self, "letters", letters)
        if len(letters) > MAX_WORD_LENGTH:
            raise WordTooLongError(f"words are capped at {MAX_WORD_LENGTH} letters")
        if any(x not in LIE_BASIS for x in letters):
            raise DomainError(f"letters must be drawn from H, E, F: {letters}")
        if self.side not in ("left", "right"):
            raise DomainError("side must be 'left' or 'right'")

    def __len__(self):
        return len(self.letters)


@dataclass(frozen=True)
class SpectralReport:
    eigenvalue_estimate: complex
    relative_spread: float
    sample_count: int


def _weight(param) -> int:
    return param.k if isinstance(param, MatrixCoefficientParam) else MatrixCoefficientParam(int(param)).k


def _matrices(g) -> np.ndarray:
    if isinstance(g, GroupElement):
        return g.to_array()
    return np.asarray(g, dtype=float)


def w_array(m: np.ndarray) -> np.ndarray:
    return (m[..., 0, 0] + m[..., 1, 1]) + 1j * (m[..., 0, 1] - m[..., 1, 0])


def _ipow(z: np.ndarray, n: int) -> np.ndarray:
    # binary powering is sign-symmetric: (-z)^n == (-1)^n z^n bit for bit
    out = np.ones_like(z)
    base = z
    while n:
        if n & 1:
            out = out * base
        n >>= 1
        if n:
            base = base * base
    return out


def coeff_array(k: int, m: np.ndarray) -> np.ndarray:
    """``c_k`` on an array of matrices of shape ``(..., 2, 2)``."""
    z = w_array(np.asarray(m, dtype=float)) / 2.0
    return 1.0 / _ipow(z, k)


def coeff(param, g) -> complex:
    k = _weight(param)
    out = coeff_array(k, _matrices(g))
    return complex(out) if np.ndim(out) == 0 else out


def abs_coeff_radial(k: int, t: float) -> float:
    if t < 0:
        raise DomainError("Cartan radius must be nonnegative")
    return math.cosh(t / 2.0) ** (-k)


# -- derivatives via multilinear jets -----------------------------------------
#
# Mixed partials d/ds_1...d/ds_n at 0 only see the part of the Taylor series
# that is linear in each s_i, so we compute in R[s_1..s_n]/(s_i^2). A jet is an
# array indexed by subsets (bitmasks) of the variables.

def _jet_mul(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    size = x.shape[0]
    out = np.zeros(np.broadcast_shapes(x.shape, y.shape), dtype=np.result_type(x, y))
    for m in range(size):
        s = m
        while True:
            out[m] = out[m] + x[s] * y[m ^ s]
            if s == 0:
                break
            s = (s - 1) & m
    return out


def _matrix_jet(word: EnvelopingWord, m: np.ndarray) -> np.ndarray:
    n = len(word)
    jet = np.zeros((1 << n,) + m.shape, dtype=float)
    jet[0] = m
    if word.side == "right":
        for i, letter in enumerate(word.letters):
            X = LIE_BASIS[letter]
            bit = 1 << i
            for mask in range(1 << n):
                if not mask & bit and mask < bit:
                    jet[mask | bit] = jet[mask] @ X
    else:
        for i, letter in enumerate(word.letters):
            X = LIE_BASIS[letter]
            bit = 1 << i
            for mask in range(1 << n):
                if not mask & bit and mask < bit:
                    jet[mask | bit] = -(X @ jet[mask])
    return jet


def derivative_array(k: int, word: EnvelopingWord, m: np.ndarray, prefix: np.ndarray | None = None) -> np.ndarray:
    """Apply ``word`` to ``c_k`` at every matrix in ``m`` (shape ``(..., 2, 2)``).

    With ``prefix`` (shape ``(n, 2, 2)``) the result has shape ``(n, ...)`` and
    holds ``word`` applied to ``x -> c_k(prefix[j] x)`` at ``m``; this is how a
    word acts on a sum of left translates.
    """
    m = np.asarray(m, dtype=float)
    n = len(word)
    jet = _matrix_jet(word, m)
    if prefix is not None:
        prefix = np.asarray(prefix, dtype=float)
        extra = (1,) * (m.ndim - 2)
        jet = prefix.reshape((1, -1) + extra + (2, 2)) @ jet[:, None]
        m = jet[0]
    if n == 0:
        return coeff_array(k, m)
    wj = w_array(jet)
    w0 = wj[0]
    delta = wj.copy()
    delta[0] = 0.0
    # f(w0 + delta) = sum_j binom(-k, j) 2^k w0^{-k-j} delta^j, delta^{n+1} = 0
    base = coeff_array(k, m)
    total = np.zeros_like(wj)
    total[0] = base
    power = np.zeros_like(wj)
    power[0] = 1.0
    binom = 1.0
    for j in range(1, n + 1):
        power = _jet_mul(power, delta)
        binom *= (-k - j + 1) / j
        total = total + binom * base * w0 ** (-j) * power
    return total[-1]


def derivative(param, word: EnvelopingWord, g) -> complex:
    k = _weight(param)
    if len(word) < 1:
        raise DomainError("derivative needs a word of length >= 1")
    out = derivative_array(k, word, _matrices(g))
    return complex(out) if np.ndim(out) == 0 else out


CASIMIR = ((0.5, ("H", "H")), (1.0, ("E", "F")), (1.0, ("F", "E")))


def casimir_array(k: int, m: np.ndarray) -> np.ndarray:
    """Right action of ``H^2/2 + EF + FE`` on ``c_k``."""
    return sum(c * derivative_array(k, EnvelopingWord(w, "right"), m) for c, w in CASIMIR)


def casimir_report(param, sample_points: Sequence[GroupElement]) -> SpectralReport:
    k = _weight(param)
    if len(sample_points) < 10:
        raise InsufficientSamplesError("need at least 10 sample points")
    m = as_matrix_array(sample_points)
    values = coeff_array(k, m)
    keep = np.abs(values) >= 1e-30
    if not keep.all():
        warnings.warn(f"skipping {int((~keep).sum())} samples where |c_k| < 1e-30", RuntimeWarning)
    if not keep.any():
        raise InsufficientSamplesError("every sample sits at a numerical zero of c_k")
    ratios = casimir_array(k, m[keep]) / values[keep]
    mean = complex(math.fsum(ratios.real), math.fsum(ratios.imag)) / len(ratios)
    spread = float(np.max(np.abs(ratios[:, None] - ratios[None, :]))) / abs(mean)
    return SpectralReport(mean, spread, int(len(ratios)))


# -- closed forms under dg = sinh(t) dk1 dt dk2, vol(K) = 1 --------------------

def lp_norm_closed_form(k: int, p: float) -> float:
    """``||c_k||_p = (4 / (pk - 2))^{1/p}``; substitute ``s = sinh(t/2)`` in the radial integral."""
    if p < 1:
        raise DomainError("p must be >= 1")
    if p * k <= 2:
        raise DivergenceError(f"c_{k} is not in L^{p}: need p*k > 2")
    return (4.0 / (p * k - 2.0)) ** (1.0 / p)


def formal_degree(k: int) -> float:
    """``d(pi)`` with ``||c_k||_2^2 = 1/d(pi)``."""
    k = MatrixCoefficientParam(k).k
    return (k - 1) / 2.0
