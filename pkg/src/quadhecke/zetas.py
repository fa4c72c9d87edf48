"""Numerical Dedekind zeta machinery.

zeta_K(s) = zeta(s) * L(s, chi_D) for the quadratic fields (zeta alone for
the rationals); the superscript-(2) variant removes the Euler factors at
the primes above 2.  Evaluation goes through a vectorized Euler-Maclaurin
Hurwitz zeta with analytic s-derivatives, so the density quadratures can
ask for thousands of values near the 1-line without calling out to mpmath
per node.  mpmath appears only in the Laurent-coefficient helper and in
test oracles.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np
from scipy.special import psi as _psi

from .fields import FieldParams
from .ring import kronecker

__all__ = [
    "hurwitz_em", "zeta_vec", "dirichlet_L_vec", "zeta_K_vec",
    "zeta_K2_vec", "zeta_K2", "log_deriv_zeta_K2_vec", "residue_rK",
    "laurent_zeta_K2", "ZetaPoleError",
]

# B_{2k} for the Euler-Maclaurin tail
_BERN2K = np.array([
    1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30, 5.0 / 66, -691.0 / 2730,
    7.0 / 6, -3617.0 / 510, 43867.0 / 798, -174611.0 / 330,
], dtype=np.float64)


class ZetaPoleError(ArithmeticError):
    """Evaluation exactly at the pole s = 1."""


def hurwitz_em(s: np.ndarray, x: float, deriv: bool = False,
               terms: Optional[int] = None):
    """Hurwitz zeta(s, x) for complex s (array) and real x in (0, 1],
    by Euler-Maclaurin; optionally also d/ds zeta(s, x).

    Accuracy is ~1e-14 relative on the strips used here (|Re s| <= 4).
    """
    s = np.atleast_1d(np.asarray(s, dtype=np.complex128))
    if np.any(s == 1.0):
        raise ZetaPoleError("hurwitz_em at s = 1")
    J = len(_BERN2K)
    tmax = float(np.max(np.abs(s.imag))) if len(s) else 0.0
    N = terms if terms is not None else max(18, int(1.3 * tmax) + 10)
    out = np.zeros(s.shape, dtype=np.complex128)
    outd = np.zeros(s.shape, dtype=np.complex128) if deriv else None
    # chunk the node axis to keep the (nodes x N) matrices modest
    for lo in range(0, len(s), 256):
        sl = s[lo:lo + 256][:, None]
        k = np.arange(N, dtype=np.float64)[None, :] + x
        lk = np.log(k)
        head = np.exp(-sl * lk)
        A = N + x
        lA = math.log(A)
        Ams = np.exp(-sl * lA)[:, 0]
        val = head.sum(axis=1) + Ams * A / (sl[:, 0] - 1.0) + 0.5 * Ams
        if deriv:
            dval = (-(head * lk).sum(axis=1)
                    + Ams * A * (-lA / (sl[:, 0] - 1.0) - 1.0 / (sl[:, 0] - 1.0) ** 2)
                    - 0.5 * lA * Ams)
        sv = sl[:, 0]
        poch = sv.copy()                 # (s)_1
        dpoch = np.ones_like(sv)         # d/ds (s)_1
        fact = 1.0
        powA = Ams / A                   # A^{-s-1}
        for j in range(J):
            m = 2 * j + 1                # poch holds (s)_m
            fact = fact * (2 * j + 1) * (2 * j + 2) if j else 2.0
            coef = _BERN2K[j] / fact
            val = val + coef * poch * powA
            if deriv:
                dval = dval + coef * (dpoch * powA - lA * poch * powA)
            # advance (s)_m -> (s)_{m+2}
            f1 = sv + m
            f2 = sv + m + 1
            dpoch = dpoch * f1 * f2 + poch * (f1 + f2)
            poch = poch * f1 * f2
            powA = powA / (A * A)
        out[lo:lo + 256] = val
        if deriv:
            outd[lo:lo + 256] = dval
    return (out, outd) if deriv else (out, None)


def zeta_vec(s, deriv: bool = False):
    return hurwitz_em(s, 1.0, deriv)


@lru_cache(maxsize=None)
def _kronecker_row(D: int) -> Tuple[int, ...]:
    q = abs(D)
    return tuple(kronecker(D, a) for a in range(q))


def dirichlet_L_vec(s, D: int, deriv: bool = False):
    """L(s, chi_D) for the Kronecker character of discriminant D < 0,
    via the Hurwitz decomposition q^-s sum_a chi(a) zeta(s, a/q)."""
    s = np.atleast_1d(np.asarray(s, dtype=np.complex128))
    q = abs(D)
    chi = _kronecker_row(D)
    tot = np.zeros(s.shape, dtype=np.complex128)
    totd = np.zeros(s.shape, dtype=np.complex128) if deriv else None
    for a in range(1, q):
        c = chi[a % q]
        if c == 0:
            continue
        z, zd = hurwitz_em(s, a / q, deriv)
        tot += c * z
        if deriv:
            totd += c * zd
    lq = math.log(q)
    qs = np.exp(-s * lq)
    if deriv:
        return qs * tot, qs * (totd - lq * tot)
    return qs * tot, None


def zeta_K_vec(s, fld: FieldParams, deriv: bool = False):
    z, zd = zeta_vec(s, deriv)
    if fld.is_rational:
        return z, zd
    L, Ld = dirichlet_L_vec(s, fld.D_K, deriv)
    if deriv:
        return z * L, zd * L + z * Ld
    return z * L, None


def _euler2(s, fld: FieldParams, deriv: bool = False):
    s = np.atleast_1d(np.asarray(s, dtype=np.complex128))
    E = np.ones(s.shape, dtype=np.complex128)
    Ed = np.zeros(s.shape, dtype=np.complex128) if deriv else None
    for n in fld.two_norms:
        ln = math.log(n)
        t = np.exp(-s * ln)
        if deriv:
            Ed = Ed * (1.0 - t) + E * ln * t
        E = E * (1.0 - t)
    return E, Ed


def zeta_K2_vec(s, fld: FieldParams, deriv: bool = False):
    """zeta_K(s) with the Euler factors at primes above 2 removed."""
    z, zd = zeta_K_vec(s, fld, deriv)
    E, Ed = _euler2(s, fld, deriv)
    if deriv:
        return z * E, zd * E + z * Ed
    return z * E, None


def zeta_K2(s: complex, fld: FieldParams) -> complex:
    if complex(s) == 1.0 + 0.0j:
        raise ZetaPoleError("zeta_K^(2) has a simple pole at s = 1")
    return complex(zeta_K2_vec(np.array([s]), fld)[0][0])


def log_deriv_zeta_K2_vec(s, fld: FieldParams):
    """(zeta_K^(2))'(s) / zeta_K^(2)(s), vectorized."""
    z, zd = zeta_K2_vec(s, fld, deriv=True)
    return zd / z


def residue_rK(fld: FieldParams) -> float:
    """Residue of zeta_K at s = 1: L(1, chi_D) for the quadratic fields
    (digamma closed form), 1 for the rationals."""
    if fld.is_rational:
        return 1.0
    D = fld.D_K
    q = abs(D)
    chi = _kronecker_row(D)
    acc = math.fsum(-chi[a] * _psi(a / q) for a in range(1, q) if chi[a])
    return acc / q


@lru_cache(maxsize=None)
def laurent_zeta_K2(d: int) -> Tuple[float, float, float]:
    """Laurent data of zeta_K^(2) at s = 1:
        zeta_K^(2)(s) = R2/(s-1) + c0 + c1 (s-1) + O((s-1)^2).

    R2 is exact (r_K times the removed Euler factors at 1); c0 and c1
    come from high-precision symmetric differences of the regularized
    function via mpmath.
    """
    import mpmath as mp

    from .fields import field_constants
    fld = field_constants(d)

    with mp.workdps(50):
        # residue of zeta_K^(2) at 1, at working precision
        if fld.is_rational:
            rK = mp.mpf(1)
        else:
            q = abs(fld.D_K)
            chi = _kronecker_row(fld.D_K)
            rK = -mp.fsum(chi[a] * mp.digamma(mp.mpf(a) / q)
                          for a in range(1, q) if chi[a]) / q
        R2mp = rK
        for n in fld.two_norms:
            R2mp *= 1 - mp.mpf(1) / n

        def reg(sv):
            # zeta_K^(2)(s) - R2/(s-1) at mp precision
            s = mp.mpf(1) + sv
            z = mp.zeta(s)
            if not fld.is_rational:
                z *= mp.power(q, -s) * mp.fsum(
                    chi[a] * mp.zeta(s, mp.mpf(a) / q)
                    for a in range(1, q) if chi[a])
            for n in fld.two_norms:
                z *= 1 - mp.power(n, -s)
            return z - R2mp / sv

        h = mp.mpf("1e-10")
        gp, gm = reg(h), reg(-h)
        c0 = float((gp + gm) / 2)
        c1 = float((gp - gm) / (2 * h))
        R2 = float(R2mp)
    return R2, c0, c1
