"""End-to-end acceptance criteria, one test per criterion.

Each test prints a ``criterion N: PASS/FAIL`` line (visible with ``-s`` and in
the terminal summary) and enforces the stated wall-time budget.
"""

import json
import math
import subprocess
import sys
import time
from contextlib import contextmanager

import numpy as np
import pytest

from conftest import brute_force_ball, fd_derivative
from poincare_lab.arithmetic import gamma_ball
from poincare_lab.certify import adelic_reduce, certificate, confirm_nonvanishing, level_threshold
from poincare_lab.discrete_series import EnvelopingWord, casimir_report, coeff, coeff_array, derivative, formal_degree
from poincare_lab.errors import DivergenceError
from poincare_lab.group import (
    GroupElement,
    a_t,
    diag,
    identity,
    multiply,
    random_element,
    rotation,
    unipotent,
)
from poincare_lab.poincare import cuspidality_residual, eval_truncated, left_invariance_check, weight_equivariance_check
from poincare_lab.quadrature import QuadratureSpec, cutoff_for_tail, integrate_group, integrate_radial, lp_norm_numeric
from poincare_lab.roots import build_a1_spec, integrability_threshold

pytestmark = pytest.mark.acceptance

PROBES = [identity(), a_t(0.5), multiply(unipotent(0.5), rotation(1 / 3)), rotation(2.0), diag(1.3)]


@contextmanager
def criterion(number, budget, pytestconfig):
    """Run a criterion body, print its verdict, and enforce the time budget."""
    start = time.perf_counter()
    ok = False
    detail = ""
    try:
        yield
        elapsed = time.perf_counter() - start
        detail = f"{elapsed:.2f}s"
        assert elapsed < budget, f"criterion {number} took {elapsed:.2f}s (budget {budget}s)"
        ok = True
    except BaseException as exc:
        detail = f"{type(exc).__name__}: {str(exc).splitlines()[0] if str(exc) else ''}"
        raise
    finally:
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'} ({detail})"
        reporter = pytestconfig.pluginmanager.getplugin("terminalreporter")
        if reporter is not None:
            reporter.write_line(line)
        else:
            print(line)


def test_criterion_01_lp_norms(pytestconfig):
    with criterion(1, 1.0, pytestconfig):
        for k, p in [(3, 1), (4, 1), (6, 1), (12, 1), (2, 2), (4, 2)]:
            exact = (4 / (p * k - 2)) ** (1 / p)
            assert lp_norm_numeric(k, p).value == pytest.approx(exact, rel=1e-8)


def test_criterion_02_integrability_threshold(pytestconfig):
    with criterion(2, 1.0, pytestconfig):
        for m in (2.5, 3.0, 4.0, 6.0):
            T = cutoff_for_tail(m / 2, 1.0, 1e-11)
            res = integrate_radial(lambda t: np.exp(-m * t / 2),
                                   QuadratureSpec(radial_panel_count=64, t_max=T, tail_exponent=m / 2))
            assert abs(res.value - 4 / (m * m - 4)) <= 1e-8
        with pytest.raises(DivergenceError):
            integrate_radial(lambda t: np.exp(-t), QuadratureSpec(tail_exponent=1.0))
        assert integrability_threshold(build_a1_spec(), 1) == 2


def test_criterion_03_schur(pytestconfig):
    with criterion(3, 10.0, pytestconfig):
        for k in (2, 4, 6):
            res = integrate_group(lambda m: np.abs(coeff_array(k, m)) ** 2, QuadratureSpec(t_max=60.0),
                                  envelope=(1.0, 2 * k))
            assert abs(res.value - 1 / formal_degree(k)) <= 1e-6
            assert abs(res.value - 2 / (k - 1)) <= 1e-6


def test_criterion_04_casimir(pytestconfig):
    rng = np.random.default_rng(4)
    pts = [random_element(rng, 2.0) for _ in range(100)]
    with criterion(4, 1.0, pytestconfig):
        for k in (3, 4, 6):
            rep = casimir_report(k, pts)
            assert rep.sample_count == 100
            assert rep.relative_spread < 1e-8


def test_criterion_05_derivatives(pytestconfig):
    rng = np.random.default_rng(5)
    pts = [random_element(rng, 2.0) for _ in range(100)]
    words = [(x,) for x in "HEF"] + [(x, y) for x in "HEF" for y in "HEF"]
    with criterion(5, 5.0, pytestconfig):
        worst = 0.0
        for side in ("right", "left"):
            for letters in words:
                h = 1e-5 if len(letters) == 1 else 1e-4
                for g in pts:
                    a = derivative(4, EnvelopingWord(letters, side), g)
                    fd = fd_derivative(4, letters, side, g, h)
                    worst = max(worst, abs(a - fd) / max(abs(fd), abs(coeff(4, g))))
        assert worst < 1e-6, worst


def test_criterion_06_enumeration(pytestconfig):
    with criterion(6, 1.0, pytestconfig):
        for N, R, count in [(2, 3.0, 10), (1, 1.5, 4), (3, 1.5, 1)]:
            ball = gamma_ball(N, R)
            assert len(ball) == count
            assert [tuple(int(x) for x in e) for e in ball.entries] == brute_force_ball(N, R)


def test_criterion_07_tail_soundness(pytestconfig):
    with criterion(7, 30.0, pytestconfig):
        for k, N in [(4, 2), (6, 2), (12, 3)]:
            for g in PROBES:
                a = eval_truncated(k, N, g, 20.0)
                b = eval_truncated(k, N, g, 40.0)
                assert abs(b.value - a.value) <= a.tail_bound


def test_criterion_08_vanishing(pytestconfig):
    k, N = 4, 2
    genus, cusps = 0, 3
    dim = (k - 1) * (genus - 1) + (k // 2 - 1) * cusps
    with criterion(8, 60.0, pytestconfig):
        assert dim == 0
        for g in PROBES:
            tv = eval_truncated(k, N, g, 40.0)
            assert abs(tv.value) <= tv.tail_bound
            assert tv.tail_bound <= 1e-3, f"tail_bound {tv.tail_bound:.4g} at g = {g.entries()}"


def test_criterion_09_cuspidality(pytestconfig):
    with criterion(9, 60.0, pytestconfig):
        for g in (identity(), GroupElement(2.0, 0.0, 0.0, 0.5)):
            r = cuspidality_residual(6, 2, g, 40.0, nodes=64)
            assert r.residual <= r.bound + 1e-6


def test_criterion_10_certificate_chain(pytestconfig):
    with criterion(10, 120.0, pytestconfig):
        c = certificate(4, 1)
        assert not c.verified and c.witness == GroupElement(-1, 0, 0, -1)
        assert certificate(4, level_threshold(4).n0).verified
        for k, N in [(4, 1), (4, 2), (4, 6), (6, 3), (6, 4), (3, 14)]:
            assert adelic_reduce(k, N).verified == certificate(k, N).verified
        for k, N in [(12, 3), (4, 6)]:
            verified = certificate(k, N)
            assert verified.verified
            hit = confirm_nonvanishing(verified)
            assert hit is not None and math.hypot(hit["value_re"], hit["value_im"]) > hit["tail_bound"]


def test_criterion_11_symmetries(pytestconfig):
    rng = np.random.default_rng(11)
    configs = []
    for _ in range(20):
        k, N = int(rng.integers(3, 9)), int(rng.integers(1, 6))
        g = random_element(rng, 1.0)
        theta = float(rng.uniform(0, 2 * math.pi))
        e = [int(x) for x in rng.integers(-2, 3, size=2)]
        gamma0 = GroupElement(1, N * e[0], 0, 1) if rng.random() < 0.5 else GroupElement(1, 0, N * e[1], 1)
        configs.append((k, N, g, theta, gamma0))
    with criterion(11, 30.0, pytestconfig):
        for k, N, g, theta, gamma0 in configs:
            assert weight_equivariance_check(k, N, g, theta, 20.0).within_bound
            assert left_invariance_check(k, N, gamma0, g, 20.0).within_bound


ENVELOPE_RUNS = [
    ["lp-norm", "--k", "4", "--p", "1"],
    ["poincare-eval", "--k", "12", "--N", "3", "--radius", "20"],
    ["cuspidality", "--k", "6", "--N", "2"],
    ["certificate", "--k", "4", "--N", "6", "--radius", "20"],
    ["level-threshold", "--k", "4"],
    ["gamma-ball", "--N", "2", "--radius", "3"],
    ["quotient-norm", "--N", "1", "--probe", "1,5,0,1"],
    ["casimir-report", "--k", "4"],
    ["sweep", "--k", "4:5", "--N", "1:3"],
]


def test_criterion_12_determinism(pytestconfig, tmp_path):
    def suite(tag):
        out = []
        for i, argv in enumerate(ENVELOPE_RUNS):
            path = tmp_path / f"{tag}-{i}.json"
            subprocess.run([sys.executable, "-m", "poincare_lab", *argv, "--out", str(path)],
                           check=True, capture_output=True)
            out.append(path.read_bytes())
        return out

    with criterion(12, 120.0, pytestconfig):
        first, second = suite("a"), suite("b")
        assert all(json.loads(x)["status"] == "ok" for x in first)
        assert first == second
