import math

import numpy as np
import pytest
import scipy.integrate as si

from quadhecke.density import (ThetaLambda, archimedean_gamma_term,
                               contour_check, default_test_function,
                               density_report, family_size, one_level_asym,
                               one_level_lhs, one_level_main,
                               prime_power_rows, smooth_test_function,
                               zero_sum_vs_explicit)
from quadhecke.fields import RATIONAL, field_constants
from quadhecke.moments import WeightFunction
from quadhecke.ring import primary_primes_up_to

F1 = field_constants(-1)
FQ = field_constants(RATIONAL)


def test_fejer_pair():
    h = default_test_function(0.5)
    assert h.h0 == pytest.approx(1.0)
    assert h.hhat0 == pytest.approx(2.0)       # triangle height 1/a
    # Fourier inversion at 0: int h = hhat(0)
    v, _ = si.quad(lambda x: h.h_real(x), -400, 400, limit=800)
    assert v == pytest.approx(h.hhat0, abs=2e-3)
    # h even
    xs = np.array([0.3, 1.7, 9.2])
    assert np.allclose(h.h_real(xs), h.h_real(-xs))
    # numerical Fourier transform of h matches the triangle
    for v0 in (0.1, 0.3, 0.45):
        ft = si.quad(lambda x: h.h_real(x) * math.cos(2 * math.pi * x * v0),
                     0, 2000, limit=4000)[0] * 2
        assert ft == pytest.approx(h.hhat(v0), abs=1e-4)
    assert h.hhat(0.6) == 0.0                  # beyond the support radius
    with pytest.raises(ValueError):
        default_test_function(-1.0)


def test_smooth_pair():
    h = smooth_test_function(0.5)
    assert h.hhat(0.51) == 0.0 and h.hhat(0.49) > 0
    v, _ = si.quad(lambda x: h.h_real(x), -60, 60, limit=800)
    assert v == pytest.approx(h.hhat0, rel=1e-7)
    ft = si.quad(lambda x: h.h_real(x) * math.cos(2 * math.pi * 0.2 * x),
                 -60, 60, limit=800)[0]
    assert ft == pytest.approx(h.hhat(0.2), rel=1e-6)
    # superpolynomial decay of h
    assert abs(h.h_real(40.0)) < 1e-5 * h.h0
    assert abs(h.h_real(80.0)) < 1e-8 * h.h0
    # hhat integral helper against quadrature
    got = h.hhat_integral(-1.0, 1.0)
    want = si.quad(lambda v: h.hhat(v), -0.5, 0.5, limit=200)[0]
    assert got == pytest.approx(want, rel=1e-9)


def test_family_size(sweep_cache):
    w = WeightFunction()
    for d in (-1, RATIONAL):
        sw = sweep_cache(d, 4096.0)
        F = family_size(4096.0, w, field_constants(d), sweep=sw)
        assert abs(F / 4096.0 - 1.0) < 4096.0 ** -0.3
    assert family_size(2.0, w, F1) == 0.0


def test_family_size_scan():
    w = WeightFunction()
    devs = []
    for X in (2048.0, 8192.0, 32768.0):
        F = family_size(X, w, F1)
        devs.append(abs(F / X - 1.0))
    assert devs[-1] < 0.05 and devs[-1] == min(devs)


def test_prime_power_support_exactness():
    # contributions vanish identically beyond N = X^a, and halving a
    # removes exactly the rows with log N in (a L/2, a L]
    X = 4096.0
    h1 = default_test_function(0.5)
    h2 = default_test_function(0.25)
    n1 = prime_power_rows(F1, X ** h1.a)[0]
    n2 = prime_power_rows(F1, X ** h2.a)[0]
    assert set(n2).issubset(set(n1))
    dropped = sorted(set(n1) - set(n2))
    assert all(X ** 0.25 < n <= X ** 0.5 for n in dropped)
    assert h1.hhat(np.log(np.max(n1) + 2) / math.log(X)) >= 0
    assert h1.hhat(0.51) == 0.0


def test_pv_prime_sum_identity():
    """PV int h(u) Z'(1 + 4 pi i u / L) du equals
    -sum Lambda N^-1 hhat(2 log N / L) + (L/4) h(0): the half-residue
    constant is +1, verified by brute quadrature."""
    from quadhecke.zetas import log_deriv_zeta_K2_vec
    h = smooth_test_function(0.5)
    LX = math.log(600.0)
    norms, logs, rows, pows = prime_power_rows(F1, 600.0 ** (h.a / 2.0))
    psum = float(np.sum(logs / norms * h.hhat(2.0 * np.log(norms) / LX)))
    closed = -psum + 0.25 * LX * h.h0
    # quadrature of the regularized integrand (the 1/eps part integrates
    # to zero over symmetric panels)
    x, wq = np.polynomial.legendre.leggauss(64)
    total = 0.0
    for lo in np.arange(0.0, 60.0, 1.5):
        hi = lo + 1.5
        u = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
        wt = 0.5 * (hi - lo) * wq
        eps = 4j * np.pi * u / LX
        zr = log_deriv_zeta_K2_vec(1.0 + eps, F1) + 1.0 / eps
        total += float(np.sum(wt * h.h_real(u) * 2 * np.real(zr)))
    assert abs(total - closed) < 5e-4 * max(1.0, abs(closed))


@pytest.mark.parametrize("d,nn", [(-1, 13), (-1, 49), (-1, 101),
                                  (RATIONAL, 3), (RATIONAL, 11)])
def test_contour_integration_identity(d, nn):
    # the module's core derived identity, against direct contour quadrature
    fld = field_constants(d)
    q = [p for p in primary_primes_up_to(fld, 500) if p.norm == nn][0]
    h = smooth_test_function(0.5)
    res = contour_check(fld, q, h, math.log(500.0), Y=3000)
    assert res["prime"] < 1e-6
    assert res["conductor"] < 1e-6
    assert res["gamma"] < 1e-6


def test_zero_count_cross_check():
    # actual zeros located by sign changes of the completed Lambda
    h = smooth_test_function(0.5)
    prs = primary_primes_up_to(F1, 200)
    picks = [q for q in prs if q.norm in (13, 37)] + \
        [q for q in primary_primes_up_to(FQ, 200) if q.norm == 7]
    for q in picks[:3]:
        fld = FQ if q.kind == "rational" else F1
        zsum, formula, tail = zero_sum_vs_explicit(fld, q, h,
                                                   math.log(200.0), T=40.0)
        assert abs(zsum - formula) < 1e-3 + tail


def test_theta_lambda_reality():
    q13 = [q for q in primary_primes_up_to(F1, 20) if q.norm == 13][0]
    tl = ThetaLambda(F1, q13)
    for t in (0.3, 1.7, 5.2):
        v = tl.lam(0.5 + 1j * t)
        assert abs(v.imag) < 1e-10 * max(1.0, abs(v))
    zs = tl.zeros_up_to(5.0)
    assert zs and all(abs(tl.z(z)) < 1e-6 for z in zs)


def test_density_pipeline_small(sweep_cache):
    w = WeightFunction()
    X = 2048.0
    sw = sweep_cache(-1, X)
    h = smooth_test_function(0.5)
    Dl, ex1 = one_level_lhs(X, h, w, F1, sweep=sw)
    Dm, ex2 = one_level_main(X, h, w, F1, sweep=sw)
    assert abs(ex2["imag_residual"]) < 1e-10
    # envelope at a = 1/2: X^((1+a)/2)/F ~ X^-0.25
    assert abs(Dl - Dm) < 3.0 * X ** -0.25
    Da, ex3 = one_level_asym(X, h, w, F1)
    assert abs(Dm - Da) < 10.0 / math.log(X) ** 2
    # the literal display reading differs at order one
    assert abs(ex2["literal_minus_derived"]) > 0.05


def test_density_report_structure(sweep_cache):
    w = WeightFunction()
    sw = sweep_cache(-1, 2048.0)
    rep = density_report(2048.0, default_test_function(0.5), w, F1, sweep=sw)
    assert rep.d == -1 and rep.a == 0.5
    assert math.isfinite(rep.D_lhs) and math.isfinite(rep.D_main)
    assert math.isfinite(rep.D_asym)
    assert rep.F_K > 0
    assert "main_line2" in rep.extras


def test_asym_requires_small_a():
    w = WeightFunction()
    with pytest.raises(ValueError):
        one_level_asym(4096.0, default_test_function(1.5), w, F1)


def test_main_vs_asym_scaling_synthetic():
    # |D_main - D_asym| L^2 bounded: fitted slope of log|diff| against
    # log L must be close to -2 (the corrected asymptotic) for the
    # rapidly decaying pair; family sums replaced by their asymptotics
    w = WeightFunction()
    h = smooth_test_function(0.5)
    diffs, Ls = [], []
    for k in (12, 14, 16, 18, 20):
        X = 2.0 ** k
        Dm, _ = one_level_main(X, h, w, F1, synthetic_family=True)
        Da, _ = one_level_asym(X, h, w, F1)
        diffs.append(abs(Dm - Da))
        Ls.append(math.log(X))
    slope = np.polyfit(np.log(Ls), np.log(diffs), 1)[0]
    assert slope < -1.5, (slope, diffs)
    assert max(d * L * L for d, L in zip(diffs, Ls)) < 10.0


def test_gamma_term_consistency():
    # Fejer tail handling against oscillation-aligned brute quadrature
    LX = math.log(65536.0)
    h = default_test_function(0.5)
    vF = archimedean_gamma_term(F1, LX, h)
    from scipy.special import psi
    val = 0.0
    for k in range(0, 60_000):
        lo = 2.0 * k
        val += si.fixed_quad(
            lambda u: h.h_real(u) * 2 * np.real(psi(0.5 + 2j * np.pi * u / LX)),
            lo, lo + 2.0, n=12)[0]
    want = (2.0 / (2.0 * LX)) * 2.0 * val
    assert vF == pytest.approx(want, abs=5e-5)
