import math

import numpy as np
import pytest

from quadhecke.fields import RATIONAL, field_constants
from quadhecke.moments import (E_exponent,
                               ShiftPoint, WeightFunction, central_main_limit,
                               central_moment, first_moment,
                               fit_error_exponent, logderiv_moment, mellin_w,
                               negative_moment, ratio_lhs, ratio_main,
                               ratio_moment)
from quadhecke.zetas import ZetaPoleError

F1 = field_constants(-1)
FQ = field_constants(RATIONAL)


def test_weight_normalization_and_mellin():
    w = WeightFunction()
    assert w.support == (1.0, 2.0)
    assert mellin_w(1.0, w) == pytest.approx(1.0, abs=1e-14)
    # conjugation symmetry of the transform of a real weight
    s = 1.3 + 7.2j
    assert mellin_w(np.conj(s), w) == pytest.approx(np.conj(mellin_w(s, w)),
                                                    rel=1e-13)
    # quadrature stability: two node counts agree far better than 1e-12
    w2 = WeightFunction(n_quad=800)
    for t in (1.0, 1 + 10j, 1 + 50j):
        assert abs(w.mellin(t) - w2.mellin(t)) < 1e-13
    # decay along vertical lines goes like exp(-c sqrt(T)) for the bump;
    # the value at T = 50 is frozen from the quadrature oracle
    vals = [abs(w.mellin(1 + 1j * T)) for T in (5, 10, 20, 40)]
    assert vals[0] > vals[1] > vals[2] > vals[3]
    assert abs(w.mellin(1 + 50j)) == pytest.approx(0.0112368484, abs=1e-9)
    logs = np.log([abs(w.mellin(1 + 1j * T)) for T in (20, 40, 80, 160)])
    roots = np.sqrt([20, 40, 80, 160])
    slope = np.polyfit(roots, logs, 1)[0]
    assert slope < -0.4          # genuine stretched-exponential decay


def test_weight_kinds():
    g = WeightFunction("gaussian-window")
    assert g.mellin(1.0) == pytest.approx(1.0, abs=1e-13)
    assert g(1.0) == 0.0 and g(2.0) == 0.0 and g(1.5) > 0
    c = WeightFunction("custom-sampled",
                       samples=[(1.2, 0.5), (1.5, 1.0), (1.8, 0.5)])
    assert c.mellin(1.0) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        WeightFunction("nope")
    with pytest.raises(ValueError):
        WeightFunction(support=(2.0, 1.0))


def test_E_exponent_examples():
    assert E_exponent(0.1, 0.05) == pytest.approx(0.95)
    assert E_exponent(0.25, 0.25) == pytest.approx(0.75)
    assert E_exponent(0.45, 0.4) == pytest.approx(0.6)
    assert E_exponent(0.3, 0.1) == pytest.approx(0.9)


def test_fit_error_exponent_selftests():
    Xs = [2.0 ** k for k in range(10, 17)]
    res = [x ** 0.75 for x in Xs]
    slope, _ = fit_error_exponent(Xs, res)
    assert abs(slope - 0.75) < 0.01
    rng = np.random.default_rng(3)
    res = [x ** 0.5 * (1 + 0.1 * math.sin(math.log(x))) for x in Xs]
    slope, resid = fit_error_exponent(Xs, res)
    assert abs(slope - 0.5) < 0.05
    assert len(resid) == len(Xs)
    with pytest.raises(ValueError):
        fit_error_exponent(Xs[:3], res[:3])
    with pytest.raises(ValueError):
        fit_error_exponent([8, 8, 8, 8], [1, 1, 1, 1])


def test_empty_support():
    w = WeightFunction()
    # support (2, 4) holds no odd prime-ideal norm of Z[i]
    val, n, skips, est = ratio_lhs(2.0, ShiftPoint(0.3, 0.1), w, F1)
    assert val == 0 and n == 0 and skips == 0


def test_ratio_main_pole_collisions():
    w = WeightFunction()
    with pytest.raises(ZetaPoleError):
        ratio_main(1000.0, ShiftPoint(0.2, 0.2), w, F1)
    with pytest.raises(ZetaPoleError):
        ratio_main(1000.0, ShiftPoint(0.2, -0.2), w, F1)
    m1, m2 = ratio_main(10_000.0, ShiftPoint(0.3, 0.1), w, F1)
    from quadhecke.zetas import zeta_K2
    want = 10_000.0 * w.mellin(1.0) * zeta_K2(1.6, F1) / zeta_K2(1.4, F1)
    assert m1 == pytest.approx(want, rel=1e-12)


def test_first_moment_basics(sweep_cache):
    w = WeightFunction()
    with pytest.raises(ValueError):
        first_moment(1024.0, 0.0, w, F1)
    sw = sweep_cache(-1, 2048.0)
    rep = first_moment(2048.0, 0.25, w, F1, sweep=sw)
    # reality for a real shift and real characters
    assert abs(rep.lhs.imag) < 1e-10 * abs(rep.lhs.real)
    assert all(abs(complex(m).imag) < 1e-10 * abs(complex(m).real)
               for m in rep.main_terms)
    assert rep.relative_error < 0.2
    assert rep.n_terms == sw.n_primes()
    # report self-description
    assert rep.residual == rep.lhs - sum(rep.main_terms)


def test_first_moment_rational(sweep_cache):
    w = WeightFunction()
    sw = sweep_cache(RATIONAL, 4096.0)
    rep = first_moment(4096.0, 0.25, w, FQ, sweep=sw)
    assert rep.relative_error < 0.1


def test_central_moment_limit_paths():
    w = WeightFunction()
    ext, closed, spread = central_main_limit(10_000.0, w, F1)
    assert abs(ext - closed) < 1e-7 * abs(closed)
    assert spread < 1e-6 * abs(closed)
    # pole cancellation: finite for a range of small alpha
    from quadhecke.moments import gamma_K
    from quadhecke.zetas import zeta_K2
    devs = []
    for aa in (1e-2, 1e-3, 1e-4):
        m1 = 10_000.0 * w.mellin(1.0) * zeta_K2(1 + 2 * aa, F1)
        m2 = (10_000.0 ** (1 - aa) * w.mellin(1 - aa) * F1.B_K ** (-aa)
              * gamma_K(F1, 0.5 + aa) * zeta_K2(1 - 2 * aa, F1))
        devs.append(abs(m1 + m2 - ext))
    # finite and converging linearly to the limit as alpha -> 0
    assert devs[0] < 0.05 * abs(ext)
    assert devs[1] < 0.15 * devs[0] and devs[2] < 0.15 * devs[1]


def test_central_moment_report(sweep_cache):
    w = WeightFunction()
    sw = sweep_cache(-1, 2048.0)
    rep = central_moment(2048.0, w, F1, sweep=sw)
    assert rep.relative_error < 0.2
    assert "main_closed_form" in rep.extras


def test_negative_moment(sweep_cache):
    w = WeightFunction()
    sw = sweep_cache(-1, 2048.0)
    rep = negative_moment(2048.0, 0.4, w, F1, sweep=sw)
    assert abs(rep.lhs.real / (2048.0 * w.mellin(1.0).real) - 1) < 0.2
    assert abs(rep.lhs.imag) < 1e-9 * abs(rep.lhs.real)
    with pytest.raises(ValueError):
        negative_moment(2048.0, -0.1, w, F1)
    # beta large: 1/L ~ 1 - chi(p2) N(p2)^(-1/2-beta) - ...
    rep5 = negative_moment(2048.0, 5.0, w, F1, sweep=sw)
    assert abs(rep5.lhs / rep5.main_terms[0] - 1) < 0.01


def test_logderiv_moment(sweep_cache):
    w = WeightFunction()
    sw = sweep_cache(-1, 2048.0)
    with pytest.raises(ValueError):
        logderiv_moment(2048.0, 0.6, w, F1)
    rep = logderiv_moment(2048.0, 0.3, w, F1, sweep=sw)
    assert abs(rep.lhs.imag) < 1e-8 * abs(rep.lhs.real)
    assert "main2_rK_variant" in rep.extras
    assert rep.extras["zld_step_consistency"] < 1e-8
    # (zeta^(2))'/zeta^(2)(1+2r) is negative for small real r
    from quadhecke.moments import _zeta2_logderiv_cdiff
    v, _ = _zeta2_logderiv_cdiff(1.6, F1)
    assert v.real < 0


def test_lhs_permutation_invariance(sweep_cache):
    # fsum accumulation: the weighted sum must not depend on prime order
    w = WeightFunction()
    sw = sweep_cache(-1, 1024.0)
    sw.run([(0.75, False)])
    terms = sw.lambdas * sw.weights * sw.L(0.75)
    base = complex(math.fsum(terms.real), math.fsum(terms.imag))
    rng = np.random.default_rng(0)
    for _ in range(5):
        p = rng.permutation(len(terms))
        v = complex(math.fsum(terms.real[p]), math.fsum(terms.imag[p]))
        assert v == base


def test_ratio_lhs_beta_large_degenerates_to_first_moment(sweep_cache):
    w = WeightFunction()
    X = 2048.0
    sw = sweep_cache(-1, X)
    val, n, skips, est = ratio_lhs(X, ShiftPoint(alpha=0.25, beta=5.0), w, F1,
                                   sweep=sw)
    rep = first_moment(X, 0.25, w, F1, sweep=sw)
    assert abs(val - rep.lhs) / abs(rep.lhs) < 0.05


def test_ratio_main_beta_large_matches_first_main():
    w = WeightFunction()
    m1, _ = ratio_main(10_000.0, ShiftPoint(0.25, 20.0), w, F1)
    rep_m1 = 10_000.0 * w.mellin(1.0) * \
        __import__("quadhecke.zetas", fromlist=["zeta_K2"]).zeta_K2(1.5, F1)
    assert abs(m1 - rep_m1) / abs(rep_m1) < 1e-6


def test_ratio_report(sweep_cache):
    w = WeightFunction()
    sw = sweep_cache(-1, 2048.0)
    rep = ratio_moment(2048.0, ShiftPoint(0.3, 0.1), w, F1, sweep=sw)
    assert rep.skips == 0
    assert rep.relative_error < 0.25
    assert rep.theorem == "ratios"
