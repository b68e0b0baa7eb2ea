import math

import numpy as np
import pytest
from hypothesis import settings
from scipy.linalg import expm

from poincare_lab.discrete_series import LIE_BASIS
from poincare_lab.group import GroupElement, random_element

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def random_points(rng):
    return [random_element(rng, 2.0) for _ in range(100)]


def brute_force_ball(N, radius):
    """Independent oracle: every integer quadruple with |entry| <= radius."""
    R = int(math.floor(radius))
    out = []
    rng_ = range(-R, R + 1)
    for a in rng_:
        for b in rng_:
            for c in rng_:
                for d in rng_:
                    if a * d - b * c != 1:
                        continue
                    if a * a + b * b + c * c + d * d > radius * radius + 1e-9:
                        continue
                    if (a - 1) % N or b % N or c % N or (d - 1) % N:
                        continue
                    out.append((a, b, c, d))
    return sorted(out)


def raw_coeff(k, m):
    """c_k straight from the defining formula, independent of the package's power routine."""
    return complex(2 ** k * (m[0, 0] + m[1, 1] + 1j * (m[0, 1] - m[1, 0])) ** (-k))


def fd_derivative(k, letters, side, g, h):
    """Central finite differences of c_k along one-parameter subgroups (scipy expm)."""
    m = g.to_array() if isinstance(g, GroupElement) else g
    n = len(letters)

    def F(steps):
        out = m
        if side == "right":
            for X, s in zip(letters, steps):
                out = out @ expm(s * LIE_BASIS[X])
        else:
            for X, s in zip(letters, steps):
                out = expm(-s * LIE_BASIS[X]) @ out
        return raw_coeff(k, out)

    total = 0.0
    for signs in np.ndindex(*(2,) * n):
        sgn = [1 if s == 0 else -1 for s in signs]
        total += math.prod(sgn) * F([h * s for s in sgn])
    return total / (2 * h) ** n
