"""Smoothing kernels for the approximate functional equation.

The completed L-function is split at a balance point t0 of the theta
integral, which turns both halves into sums against the normalized upper
incomplete gamma Q(a, x) = Gamma(a, x)/Gamma(a):

    quadratic K:   L(s) = sum a_nu nu^-s Q(s, nu t0 / C)
                        + eps(s) sum a_nu nu^(s-1) Q(1-s, nu / (C t0)),
    rationals:     same shape with Q(s/2, (n/C)^2 t0) etc.,

with C = sqrt(B_K N(pi)) and eps(s) = C^(1-2s) Gamma_K(s).  scipy's
incomplete gamma is real-order only, so Q is implemented here (series +
Lentz continued fraction) for complex order and validated against mpmath.
Kernel values are tabulated on a log-uniform grid per (order, balance)
and interpolated with 4-point Lagrange stencils, keeping the per-prime
cost of a family sweep at a few gathers per term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import loggamma

__all__ = ["gamma_q", "KernelGrid", "Y_CUT"]

#: kernel argument beyond which terms are dropped (Q < ~3e-19 there)
Y_CUT = 45.0

_FPMIN = 1e-290


def gamma_q(a: complex, x: np.ndarray) -> np.ndarray:
    """Q(a, x) = Gamma(a, x)/Gamma(a) for complex a (Re a > -0.25 in
    practice here) and a vector of positive reals x."""
    a = complex(a)
    x = np.asarray(x, dtype=np.float64)
    out = np.empty(x.shape, dtype=np.complex128)
    small = x < abs(a) + 1.0
    if small.any():
        out[small] = 1.0 - _p_series(a, x[small])
    big = ~small
    if big.any():
        out[big] = _q_contfrac(a, x[big])
    return out


def _p_series(a: complex, x: np.ndarray) -> np.ndarray:
    # P(a,x) = x^a e^-x / Gamma(a) * sum_n x^n / (a (a+1) ... (a+n))
    g = np.full(x.shape, 1.0 / a, dtype=np.complex128)
    term = g.copy()
    for n in range(1, 420):
        term = term * x / (a + n)
        g += term
        if np.max(np.abs(term)) < 1e-18 * max(np.min(np.abs(g)), 1e-30):
            break
    return g * np.exp(a * np.log(x) - x - loggamma(a))


def _q_contfrac(a: complex, x: np.ndarray) -> np.ndarray:
    # Lentz evaluation of the Legendre continued fraction for Gamma(a, x)
    b = x + 1.0 - a
    c = np.full(x.shape, 1.0 / _FPMIN, dtype=np.complex128)
    d = 1.0 / b
    h = d.copy()
    for i in range(1, 300):
        an = -i * (i - a)
        b = b + 2.0
        d = an * d + b
        d = np.where(np.abs(d) < _FPMIN, _FPMIN, d)
        c = b + an / c
        c = np.where(np.abs(c) < _FPMIN, _FPMIN, c)
        d = 1.0 / d
        delta = d * c
        h *= delta
        if np.max(np.abs(delta - 1.0)) < 1e-16:
            break
    return np.exp(-x + a * np.log(x) - loggamma(a)) * h


@dataclass
class KernelGrid:
    """A smooth kernel tabulated on a log-uniform grid with optional
    s-derivative values; evaluation is a 4-point Lagrange stencil."""
    a: complex
    lx0: float
    h: float
    vals: np.ndarray
    dvals: Optional[np.ndarray] = None

    @classmethod
    def build(cls, a: complex, y_min: float, y_max: float = Y_CUT,
              n: int = 8192, deriv: bool = False) -> "KernelGrid":
        """Grid of Q(a, .); the node count should grow with |Im a| to hold
        the stencil error (the caller scales n)."""
        y, lx0, h = cls.nodes(y_min, y_max, n)
        vals = gamma_q(a, y)
        dvals = None
        if deriv:
            da = 1e-6
            dvals = (gamma_q(a + da, y) - gamma_q(a - da, y)) / (2 * da)
        return cls(a=a, lx0=lx0, h=h, vals=vals, dvals=dvals)

    @staticmethod
    def nodes(y_min: float, y_max: float, n: int):
        lx0, lx1 = math.log(y_min), math.log(y_max)
        h = (lx1 - lx0) / (n - 1)
        return np.exp(lx0 + h * np.arange(n)), lx0, h

    def eval(self, y: np.ndarray, deriv: bool = False) -> np.ndarray:
        """4-point Lagrange interpolation; arguments are clamped to the
        grid (the kernel is ~1e-19 at the top node, so clamping there is
        equivalent to dropping the term)."""
        vals = self.dvals if deriv else self.vals
        n = len(vals)
        t = np.log(y)
        t -= self.lx0
        t *= 1.0 / self.h
        np.clip(t, 1.0, n - 2.0 - 1e-9, out=t)
        i = t.astype(np.int64)
        f = t - i
        g1 = f - 1.0
        g2 = f - 2.0
        fg = f * g1
        out = vals[i - 1] * (fg * g2 * (-1.0 / 6.0))
        out += vals[i] * ((f + 1.0) * g1 * g2 * 0.5)
        out += vals[i + 1] * (f * (f + 1.0) * g2 * (-0.5))
        out += vals[i + 2] * (fg * (f + 1.0) * (1.0 / 6.0))
        return out
