"""Numerical evaluation of the quadratic Hecke L-functions L(s, chi^(c_K pi))
and of the Dedekind zeta data entering the moment main terms.

The evaluator is the balanced incomplete-gamma approximate functional
equation of :mod:`quadhecke.afe`; it is an exact identity for entire L
(theta-integral split), so a single code path covers the critical strip
and the absolutely convergent half-plane alike.  Independent oracles for
the tests: plain truncated Dirichlet sums at Re(s) = 2, a theta-integral
quadrature route, and a Hurwitz-zeta route for the rationals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy.special import loggamma

from . import kernels
from .afe import Y_CUT, KernelGrid, gamma_q
from .fields import FieldParams, dlog_gamma_K, gamma_K
from .ring import PrimaryPrime, QuadInt, c_K
from .zetas import residue_rK, zeta_K2  # re-exported: the residue is part of this module's surface

__all__ = [
    "LEvaluation", "NearZeroError", "conductor_scale", "L_chi", "L_logderiv",
    "fe_residual", "L_direct", "L_theta_oracle", "theta_modularity_residual",
    "gr_bound_check", "GRBoundRecord", "residue_rK", "zeta_K2", "AfeContext",
]


class NearZeroError(ArithmeticError):
    """|L| below the regularization-free threshold in a denominator."""

    def __init__(self, msg: str, absL: float):
        super().__init__(msg)
        self.absL = absL


@dataclass
class LEvaluation:
    s: complex
    value: complex
    derivative: Optional[complex]
    est_error: float
    terms_used: int


def _pi_el(pi: Union[QuadInt, PrimaryPrime]) -> QuadInt:
    return pi.pi if isinstance(pi, PrimaryPrime) else pi


def conductor_scale(fld: FieldParams, norm_pi: int) -> float:
    """C = sqrt(B_K N(pi)); the AFE sums have effective length ~C."""
    return math.sqrt(fld.B_K * norm_pi)


def root_factor(fld: FieldParams, s: complex, C: float) -> complex:
    """eps(s) = C^(1-2s) Gamma_K(s) = (B_K N(pi))^(1/2-s) Gamma_K(s)."""
    return np.exp((1.0 - 2.0 * s) * math.log(C)) * gamma_K(fld, s)


def afe_cutoff(fld: FieldParams, C: float, t0: float = 1.0) -> int:
    """Largest norm contributing to either AFE sum at balance t0."""
    if fld.is_rational:
        return int(C * math.sqrt(Y_CUT * max(t0, 1.0 / t0))) + 1
    return int(C * Y_CUT * max(1.0 / t0, t0)) + 1


class AfeContext:
    """Kernel grids and power tables for one evaluation point s.

    Shared across every prime of a family sweep: only the conductor scale
    C (hence the kernel argument) changes from prime to prime.

    The first kernel is Q(s, y) (Q(s/2, y) over the rationals); the second
    is the entire combination W(y) = Gamma_K(s) Q(1-s, y), stored with the
    gamma ratio folded in so that the pole of Gamma(1-s) against the zero
    of 1/Gamma(1-s) in Q never appears; outside the safe strip the W grid
    is built by mpmath.
    """

    def __init__(self, fld: FieldParams, s: complex, M_max: int,
                 t0: float = 1.0, deriv: bool = False, y_min: float = 1e-7):
        self.fld = fld
        self.s = complex(s)
        self.t0 = float(t0)
        self.deriv = deriv
        self._half = 0.5 if fld.is_rational else 1.0     # d(order)/ds
        if fld.is_rational:
            a1, a2 = self.s / 2, (1.0 - self.s) / 2
        else:
            a1, a2 = self.s, 1.0 - self.s
        n = int(8192 * max(1.0, 1.6 * abs(self.s.imag)))
        self._ds_mode = not (a1.real > -0.2 and a2.real > -0.2)
        if not self._ds_mode:
            gK = gamma_K(fld, self.s)
            dlgK = dlog_gamma_K(fld, self.s) if deriv else 0.0
            self.grid1 = KernelGrid.build(a1, y_min, Y_CUT, n=n, deriv=deriv)
            g2 = KernelGrid.build(a2, y_min, Y_CUT, n=n, deriv=deriv)
            # second kernel with Gamma_K folded in, so its Gamma(1-s) pole
            # never materializes:  K2 = Gamma_K(s) Q(a2, .) and
            # d/ds K2 = Gamma_K (dlog Gamma_K * Q - half * Q_a)
            dvals2 = (gK * (dlgK * g2.vals - self._half * g2.dvals)
                      if deriv else None)
            self.grid2 = KernelGrid(a=a2, lx0=g2.lx0, h=g2.h,
                                    vals=gK * g2.vals, dvals=dvals2)
        else:
            self.grid1, self.grid2 = self._mp_grids(a1, a2, y_min, n, deriv)
        nu = np.arange(M_max + 1, dtype=np.float64)
        nu[0] = 1.0
        self.lognu = np.log(nu)
        self.pw1 = np.exp(-self.s * self.lognu)          # nu^-s
        self.pw2 = np.exp((self.s - 1.0) * self.lognu)   # nu^(s-1)

    def _mp_grids(self, a1, a2, y_min, n, deriv):
        """Out-of-strip grids via mpmath: K1 = Q(a1, .) and the entire
        combination K2 = Gamma(a2, y)/Gamma(gamma-denominator); derivative
        grids hold d/ds directly (ds mode)."""
        import mpmath as mp
        y, lx0, h = KernelGrid.nodes(y_min, Y_CUT, max(2048, n // 4))

        def pair(sv):
            sv = mp.mpc(sv)
            if self.fld.is_rational:
                o1, o2, den = sv / 2, (1 - sv) / 2, mp.gamma(sv / 2)
            else:
                o1, o2, den = sv, 1 - sv, mp.gamma(sv)
            v1 = np.array([complex(mp.gammainc(o1, t, mp.inf) / mp.gamma(o1))
                           for t in y])
            v2 = np.array([complex(mp.gammainc(o2, t, mp.inf) / den)
                           for t in y])
            return v1, v2

        import mpmath
        with mpmath.workdps(30):
            v1, v2 = pair(self.s)
            dv1 = dv2 = None
            if deriv:
                hs = 1e-6
                v1p, v2p = pair(self.s + hs)
                v1m, v2m = pair(self.s - hs)
                dv1 = (v1p - v1m) / (2 * hs)
                dv2 = (v2p - v2m) / (2 * hs)
        return (KernelGrid(a=a1, lx0=lx0, h=h, vals=v1, dvals=dv1),
                KernelGrid(a=a2, lx0=lx0, h=h, vals=v2, dvals=dv2))

    def cutoff(self, C: float) -> int:
        return afe_cutoff(self.fld, C, self.t0)

    def _args(self, C: float, M: int):
        nu = np.arange(1, M + 1, dtype=np.float64)
        if self.fld.is_rational:
            base = (nu / C) ** 2
            return base * self.t0, base / self.t0
        return nu * (self.t0 / C), nu / (C * self.t0)

    def evaluate(self, a: np.ndarray, C: float,
                 want_deriv: bool = False) -> LEvaluation:
        """AFE value (and s-derivative) for coefficient vector a[0..M]."""
        fld, s = self.fld, self.s
        M = min(len(a) - 1, self.cutoff(C))
        av = a[1:M + 1].astype(np.float64)
        y1, y2 = self._args(C, M)
        K1 = self.grid1.eval(y1)
        K2 = self.grid2.eval(y2)
        t1 = av * self.pw1[1:M + 1]
        t2 = av * self.pw2[1:M + 1]
        S1 = np.sum(t1 * K1)
        S2 = np.sum(t2 * K2)
        rho = np.exp((1.0 - 2.0 * s) * math.log(C))      # C^(1-2s)
        val = S1 + rho * S2
        est = self._tail_bound(C, M) + 1e-13 * (np.sum(np.abs(t1)) +
                                                abs(rho) * np.sum(np.abs(t2)))
        deriv = None
        if want_deriv:
            if not self.deriv:
                raise ValueError("context built without derivative grids")
            dK1 = self.grid1.eval(y1, deriv=True)
            if not self._ds_mode:
                dK1 = self._half * dK1      # grid holds Q_a; d(order)/ds
            dK2 = self.grid2.eval(y2, deriv=True)   # d/ds in both modes
            ln = self.lognu[1:M + 1]
            dS1 = np.sum(t1 * (dK1 - ln * K1))
            dS2 = np.sum(t2 * (ln * K2 + dK2))
            deriv = dS1 + rho * (-2.0 * math.log(C) * S2 + dS2)
        return LEvaluation(s=s, value=complex(val), derivative=deriv,
                           est_error=float(est), terms_used=int(M))

    def _tail_bound(self, C: float, M: int) -> float:
        # magnitude of the first omitted band of terms, padded
        sig = self.s.real
        if self.fld.is_rational:
            y = ((M + 1) / C) ** 2 * min(self.t0, 1.0 / self.t0)
        else:
            y = (M + 1) * min(self.t0, 1.0 / self.t0) / C
        if y >= Y_CUT:
            return 0.0
        qv = abs(gamma_q(self.grid1.a, np.array([max(y, 1e-8)]))[0])
        return 8.0 * C * qv * (M + 1.0) ** (-min(sig, 1.0 - sig))


def chi_coefficients_for(fld: FieldParams, pi: Union[QuadInt, PrimaryPrime],
                         M: int) -> np.ndarray:
    """Dirichlet coefficients of L(s, chi^(c_K pi)) up to norm M."""
    top = c_K(fld) * _pi_el(pi)
    return kernels.chi_coefficients(fld, top, M)


def L_chi(s: complex, pi: Union[QuadInt, PrimaryPrime], fld: FieldParams,
          t0: float = 1.0, want_deriv: bool = False) -> LEvaluation:
    """L(s, chi^(c_K pi)) by the balanced AFE."""
    n = _pi_el(pi).norm()
    C = conductor_scale(fld, n)
    M = afe_cutoff(fld, C, t0)
    tmin = min(t0, 1.0 / t0)
    y_min = 0.5 * (tmin / C ** 2 if fld.is_rational else tmin / C)
    ctx = AfeContext(fld, s, M, t0=t0, deriv=want_deriv, y_min=y_min)
    a = chi_coefficients_for(fld, pi, M)
    return ctx.evaluate(a, C, want_deriv=want_deriv)


def L_logderiv(s: complex, pi: Union[QuadInt, PrimaryPrime], fld: FieldParams,
               zero_tol: float = 1e-12) -> LEvaluation:
    """L'/L(s, chi^(c_K pi)); raises NearZeroError instead of regularizing
    a (numerically) vanishing denominator."""
    ev = L_chi(s, pi, fld, want_deriv=True)
    if abs(ev.value) < zero_tol:
        raise NearZeroError(f"|L({s})| = {abs(ev.value):.3e} below threshold",
                            abs(ev.value))
    return LEvaluation(s=s, value=ev.derivative / ev.value, derivative=None,
                       est_error=ev.est_error * (1.0 + abs(ev.derivative))
                       / max(abs(ev.value), zero_tol),
                       terms_used=ev.terms_used)


def fe_residual(s: complex, pi: Union[QuadInt, PrimaryPrime],
                fld: FieldParams) -> float:
    """Relative residual of L(s) = eps(s) L(1-s), the two sides evaluated
    with different balance points so the identity is not trivially zero."""
    n = _pi_el(pi).norm()
    C = conductor_scale(fld, n)
    lhs = L_chi(s, pi, fld, t0=1.3).value
    rhs = root_factor(fld, s, C) * L_chi(1.0 - s, pi, fld, t0=1.0).value
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-30)


# --------------------------------------------------------------------------
# independent oracles (test harness only)
# --------------------------------------------------------------------------

def L_direct(s: complex, pi: Union[QuadInt, PrimaryPrime], fld: FieldParams,
             M: int) -> complex:
    """Plain truncated Dirichlet sum; honest only for Re(s) > 1."""
    a = chi_coefficients_for(fld, pi, M)
    nz = np.nonzero(a)[0]
    nz = nz[nz >= 1]
    return complex(np.sum(a[nz] * np.exp(-complex(s) * np.log(nz))))


def _theta_sum(fld: FieldParams, a: np.ndarray, C: float, t: float) -> float:
    nu = np.arange(1, len(a), dtype=np.float64)
    if fld.is_rational:
        expo = -nu * nu * t / (C * C)
    else:
        expo = -nu * t / C
    return float(np.sum(a[1:] * np.exp(expo)))


def theta_modularity_residual(pi: Union[QuadInt, PrimaryPrime],
                              fld: FieldParams, t: float) -> float:
    """|phi(t) - t^-w phi(1/t)| with w = 1 (quadratic) or 1/2 (rationals):
    a direct numerical functional-equation (root number +1) check."""
    n = _pi_el(pi).norm()
    C = conductor_scale(fld, n)
    if fld.is_rational:
        M = int(C * math.sqrt(45.0 * max(t, 1.0 / t) / min(t, 1.0))) + 2
    else:
        M = int(C * 45.0 / min(t, 1.0 / t)) + 2
    a = chi_coefficients_for(fld, pi, M)
    lhs = _theta_sum(fld, a, C, t)
    w = 0.5 if fld.is_rational else 1.0
    rhs = t ** (-w) * _theta_sum(fld, a, C, 1.0 / t)
    return abs(lhs - rhs)


def L_theta_oracle(s: complex, pi: Union[QuadInt, PrimaryPrime],
                   fld: FieldParams, panels: int = 24, nodes: int = 48) -> complex:
    """Independent evaluation through a numerical Mellin integral of the
    theta series: Lambda(s) = int_1^inf (t^(s-1) + t^-s) phi(t) dt for the
    quadratic fields (and the half-exponent analogue for the rationals),
    followed by division by the completed-gamma factor.  Quadrature and
    exponential sums only; no incomplete-gamma machinery shared with L_chi.
    """
    s = complex(s)
    n = _pi_el(pi).norm()
    C = conductor_scale(fld, n)
    if fld.is_rational:
        T = 50.0 * C * C
        M = int(C * math.sqrt(50.0)) + 2
    else:
        T = 50.0 * C
        M = int(C * 50.0) + 2
    a = chi_coefficients_for(fld, pi, M)
    nu = np.arange(1, len(a), dtype=np.float64)
    anz = a[1:].astype(np.float64)
    xg, wg = np.polynomial.legendre.leggauss(nodes)
    edges = np.exp(np.linspace(0.0, math.log(T), panels + 1))
    total = 0.0 + 0.0j
    for k in range(panels):
        lo, hi = edges[k], edges[k + 1]
        t = 0.5 * (hi - lo) * xg + 0.5 * (hi + lo)
        wt = 0.5 * (hi - lo) * wg
        if fld.is_rational:
            phi = np.exp(-nu[None, :] ** 2 * (t[:, None] / (C * C))) @ anz
            integrand = (t ** (s / 2) + t ** ((1.0 - s) / 2)) * phi / t
        else:
            phi = np.exp(-nu[None, :] * (t[:, None] / C)) @ anz
            integrand = (t ** s + t ** (1.0 - s)) * phi / t
        total += np.sum(wt * integrand)
    ga = loggamma(s / 2 if fld.is_rational else s)
    return complex(total * np.exp(-s * math.log(C) - ga))


def L_hurwitz_oracle_rational(s: complex, pi_norm: int) -> complex:
    """Textbook evaluation for the rationals: L(s, chi_(8 pi)) via Hurwitz
    zeta values over the residue classes mod 8 pi (mpmath)."""
    import mpmath as mp
    from .ring import jacobi
    q = 8 * pi_norm
    with mp.workdps(30):
        tot = mp.mpc(0)
        for aa in range(1, q):
            if aa % 2 == 0:
                continue
            c = jacobi(q % aa, aa) if aa > 1 else 1
            if c:
                tot += c * mp.zeta(mp.mpc(s), mp.mpf(aa) / q)
        tot *= mp.power(q, -mp.mpc(s))
        return complex(tot)


# --------------------------------------------------------------------------
# GRH-shaped diagnostic
# --------------------------------------------------------------------------

@dataclass
class GRBoundRecord:
    s: complex
    norm_pi: int
    absL: float
    ratio: float
    ceiling: float
    flagged: bool


def gr_bound_check(s: complex, pi: Union[QuadInt, PrimaryPrime],
                   fld: FieldParams, exponent: float = 0.1,
                   ceiling: float = 10.0) -> GRBoundRecord:
    """|L(s)| against ((N(pi)+2)(1+|s|))^exponent: a growth diagnostic in
    the spirit of the GRH bounds; the exponent and ceiling are
    configuration defaults, nothing more."""
    if s.real < 0.5:
        raise ValueError("diagnostic defined for Re(s) >= 1/2")
    n = _pi_el(pi).norm()
    absL = abs(L_chi(s, pi, fld).value)
    ratio = absL / ((n + 2.0) * (1.0 + abs(s))) ** exponent
    return GRBoundRecord(s=complex(s), norm_pi=n, absL=absL, ratio=ratio,
                         ceiling=ceiling, flagged=ratio > ceiling)
