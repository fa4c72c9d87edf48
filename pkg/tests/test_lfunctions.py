import numpy as np
import pytest

from quadhecke.fields import RATIONAL, field_constants
from quadhecke.lfunctions import (L_chi, L_direct,
                                  L_hurwitz_oracle_rational, L_logderiv,
                                  L_theta_oracle, NearZeroError, afe_cutoff,
                                  conductor_scale,
                                  fe_residual, gr_bound_check,
                                  theta_modularity_residual)
from quadhecke.ring import primary_primes_up_to

F1 = field_constants(-1)
FQ = field_constants(RATIONAL)
PRIMES_1 = primary_primes_up_to(F1, 600)
PI13 = [q for q in PRIMES_1 if q.norm == 13][0]
PQ3 = [q for q in primary_primes_up_to(FQ, 20) if q.norm == 3][0]


def test_fe_residual_small_sample():
    rng = np.random.default_rng(42)
    for q in (PI13, PQ3):
        fld = F1 if q is PI13 else FQ
        for _ in range(3):
            s = 0.5 + 1j * rng.uniform(-5, 5)
            assert fe_residual(s, q, fld) < 1e-8


def test_direct_sum_oracle_at_two():
    ev = L_chi(2.0, PI13, F1)
    direct = L_direct(2.0, PI13, F1, 2_000_000)
    assert abs(ev.value - direct) < 1e-9
    assert ev.est_error < 1e-8
    evq = L_chi(2.0, PQ3, FQ)
    directq = L_direct(2.0, PQ3, FQ, 3_000_000)
    assert abs(evq.value - directq) < 1e-9


def test_theta_oracle_agreement():
    for s in (0.7, 0.5 + 1.3j, 0.25):
        ev = L_chi(s, PI13, F1)
        th = L_theta_oracle(s, PI13, F1)
        assert abs(ev.value - th) < 1e-9
    ev = L_chi(0.6, PQ3, FQ)
    th = L_theta_oracle(0.6, PQ3, FQ)
    assert abs(ev.value - th) < 1e-9


def test_theta_modularity():
    # a direct numerical functional-equation / root-number check
    for q, fld in ((PI13, F1), (PQ3, FQ)):
        for t in (0.8, 1.3):
            assert theta_modularity_residual(q, fld, t) < 1e-10


def test_hurwitz_oracle_rational_central_value():
    ev = L_chi(0.5, PQ3, FQ)
    ref = L_hurwitz_oracle_rational(0.5, 3)
    assert abs(ev.value - ref) < 1e-8


def test_reality_and_conjugation():
    for s in (0.6, 0.75, 0.9):
        v = L_chi(s, PI13, F1).value
        assert abs(v.imag) < 1e-10
    s = 0.5 + 2.2j
    v1 = L_chi(s, PI13, F1).value
    v2 = L_chi(np.conj(s), PI13, F1).value
    assert abs(v1 - np.conj(v2)) < 1e-9


def test_derivative_vs_finite_difference():
    ev = L_chi(0.6, PI13, F1, want_deriv=True)
    hstep = 1e-4
    fd = (L_chi(0.6 + hstep, PI13, F1).value
          - L_chi(0.6 - hstep, PI13, F1).value) / (2 * hstep)
    assert abs(ev.derivative - fd) < 1e-5


def test_logderiv_direct_sum():
    # -L'/L(s) = sum Lambda_K(n) chi(n) N(n)^-s over odd prime powers
    s = 2.0
    ld = L_logderiv(s, PI13, F1)
    from quadhecke.density import prime_power_rows
    from quadhecke.kernels import symbol_values
    from quadhecke.ring import c_K
    Y = 1_000_000
    norms, logs, rows, pows = prime_power_rows(F1, Y)
    syms = symbol_values(F1, c_K(F1) * PI13.pi, Y + 1)
    chiv = syms[rows].astype(np.float64) ** pows
    acc = float(np.sum(logs * chiv * norms ** -s))
    assert abs(-ld.value - acc) < 1e-8


def test_balance_independence():
    # the evaluation must not depend on the AFE balance point
    v1 = L_chi(0.6, PI13, F1, t0=1.0)
    v2 = L_chi(0.6, PI13, F1, t0=1.4)
    v3 = L_chi(0.6, PI13, F1, t0=0.75)
    spread = max(abs(v1.value - v2.value), abs(v1.value - v3.value))
    assert spread < 50 * max(v1.est_error, v2.est_error, 1e-14)


def test_near_zero_denominator():
    from quadhecke.density import ThetaLambda
    tl = ThetaLambda(F1, PI13)
    gamma0 = tl.zeros_up_to(2.0)[0]
    with pytest.raises(NearZeroError) as exc:
        L_logderiv(0.5 + 1j * gamma0, PI13, F1, zero_tol=1e-6)
    assert exc.value.absL < 1e-6


def test_gr_bound_diagnostic():
    rec = gr_bound_check(0.5, PI13, F1)
    assert not rec.flagged and rec.norm_pi == 13 and rec.absL > 0
    rec2 = gr_bound_check(2.0 + 0.5j, PI13, F1)
    assert rec2.ratio < rec.ceiling
    with pytest.raises(ValueError):
        gr_bound_check(0.3, PI13, F1)


def test_afe_cutoff_scaling():
    C = conductor_scale(F1, 10_000)
    assert afe_cutoff(F1, C, 1.0) > C
    assert afe_cutoff(FQ, C, 1.0) < afe_cutoff(F1, C, 1.0)
