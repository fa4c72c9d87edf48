"""Moment statistics of the quadratic Hecke family: the shifted-ratio
average, the first moment and its central-value limit, the negative
moment, and the log-derivative moment, each with its main terms and an
empirical error-exponent fit.

All left-hand sides are weighted sums over primary primes with norm in
the support of the scaled weight; the per-prime L-values come from one
shared family sweep so that the coefficient sieve runs once per prime no
matter how many statistics are requested.  Sums are accumulated with
math.fsum, which makes them exactly permutation-invariant.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .fields import FieldParams, dlog_gamma_K, gamma_K
from .lfunctions import AfeContext, afe_cutoff, conductor_scale
from .ring import PrimaryPrime, primary_primes_up_to
from .zetas import ZetaPoleError, laurent_zeta_K2, zeta_K2

__all__ = [
    "WeightFunction", "ShiftPoint", "MomentReport", "FamilySweep",
    "E_exponent", "mellin_w", "ratio_lhs", "ratio_main", "ratio_moment",
    "first_moment", "central_moment", "negative_moment", "logderiv_moment",
    "fit_error_exponent",
]


# --------------------------------------------------------------------------
# weights
# --------------------------------------------------------------------------

class WeightFunction:
    """Smooth nonnegative weight, compactly supported in (0, infinity).

    kinds:
      * ``bump`` (default): exp(-1/(1-u^2)) with u = 2t-3, support (1, 2),
        normalized to unit mass, so the family windows are (X, 2X).
      * ``gaussian-window``: a Gaussian centered in (t1, t2) cut off by a
        smooth bump factor, then normalized.
      * ``custom-sampled``: cubic interpolation through caller samples,
        forced to vanish at the support endpoints.
    """

    def __init__(self, kind: str = "bump",
                 support: Tuple[float, float] = (1.0, 2.0),
                 samples: Optional[Sequence[Tuple[float, float]]] = None,
                 gauss_sigma: float = 0.18, n_quad: int = 480):
        if support[0] <= 0 or support[1] <= support[0]:
            raise ValueError("support must be (t1, t2) with 0 < t1 < t2")
        self.kind = kind
        self.support = (float(support[0]), float(support[1]))
        t1, t2 = self.support
        if kind == "bump":
            self._raw = self._bump
        elif kind == "gaussian-window":
            c = 0.5 * (t1 + t2)
            self._gc, self._gs = c, gauss_sigma * (t2 - t1)
            self._raw = self._gauss
        elif kind == "custom-sampled":
            if not samples:
                raise ValueError("custom-sampled weight needs samples")
            xs = np.array([t1] + [p[0] for p in samples] + [t2])
            ys = np.array([0.0] + [p[1] for p in samples] + [0.0])
            order = np.argsort(xs)
            self._xs, self._ys = xs[order], ys[order]
            self._raw = self._sampled
        else:
            raise ValueError(f"unknown weight kind {kind!r}")
        x, wq = np.polynomial.legendre.leggauss(n_quad)
        self._qt = 0.5 * (t2 - t1) * x + 0.5 * (t2 + t1)
        self._qw = 0.5 * (t2 - t1) * wq
        raw_mass = float(np.sum(self._qw * self._raw(self._qt)))
        if raw_mass <= 0:
            raise ValueError("weight has nonpositive mass")
        self._scale = 1.0 / raw_mass
        self._qv = self._scale * self._raw(self._qt)

    # raw shapes ------------------------------------------------------------
    def _bump(self, t):
        t1, t2 = self.support
        u = (2.0 * t - (t1 + t2)) / (t2 - t1)
        out = np.zeros_like(np.asarray(t, dtype=np.float64))
        inside = np.abs(u) < 1.0
        out[inside] = np.exp(-1.0 / (1.0 - u[inside] ** 2))
        return out

    def _gauss(self, t):
        return self._bump(t) * np.exp(-((t - self._gc) / self._gs) ** 2 / 2.0)

    def _sampled(self, t):
        return np.clip(np.interp(t, self._xs, self._ys), 0.0, None)

    # public API -------------------------------------------------------------
    def __call__(self, t):
        t = np.asarray(t, dtype=np.float64)
        scalar = t.ndim == 0
        v = self._scale * self._raw(np.atleast_1d(t))
        return float(v[0]) if scalar else v

    def mellin(self, s: complex) -> complex:
        """what-hat(s) = int w(t) t^(s-1) dt by fixed Gauss-Legendre
        quadrature over the support (relative error ~1e-13 for |Im s|
        well past 50)."""
        s = complex(s)
        return complex(np.sum(self._qv * self._qw *
                              np.exp((s - 1.0) * np.log(self._qt))))

    def mellin_vec(self, s: np.ndarray) -> np.ndarray:
        lg = np.log(self._qt)
        mat = np.exp(np.multiply.outer(np.asarray(s, dtype=np.complex128) - 1.0, lg))
        return mat @ (self._qv * self._qw)

    def log_moment(self, power: int = 1) -> float:
        """int w(t) (log t)^power dt  (= what-hat derivatives at 1)."""
        return float(np.sum(self._qv * self._qw * np.log(self._qt) ** power))


def mellin_w(s: complex, w: WeightFunction) -> complex:
    return w.mellin(s)


# --------------------------------------------------------------------------
# shifts and reports
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ShiftPoint:
    alpha: complex = 0.0
    beta: complex = 0.0
    r: complex = 0.0


def E_exponent(alpha: complex, beta: complex) -> float:
    """Error-exponent envelope of the shifted-ratio asymptotic."""
    ra, rb = complex(alpha).real, complex(beta).real
    return max(0.5, 1.0 - ra - rb, 1.0 - ra / 2 - rb / 2, 0.75 - ra, 1.0 - rb)


@dataclass
class MomentReport:
    theorem: str
    d: int
    X: float
    alpha: complex = 0.0
    beta: complex = 0.0
    lhs: complex = 0.0
    main_terms: List[complex] = field(default_factory=list)
    residual: complex = 0.0
    relative_error: float = 0.0
    fitted_exponent: Optional[float] = None
    n_terms: int = 0
    skips: int = 0
    est_error: float = 0.0
    seconds: float = 0.0
    extras: Dict[str, complex] = field(default_factory=dict)

    def finalize(self) -> "MomentReport":
        main = sum(self.main_terms)
        self.residual = self.lhs - main
        denom = max(abs(main), 1e-300)
        self.relative_error = abs(self.residual) / denom
        if abs(self.residual) < self.est_error:
            # smaller than the propagated evaluation error: agreement at
            # this level is numerically unresolved, not confirmed
            self.extras["numerically_unresolved"] = 1.0
        return self


# --------------------------------------------------------------------------
# family sweep
# --------------------------------------------------------------------------

class FamilySweep:
    """All per-prime L-data needed by the moment statistics at one X.

    Evaluation points are registered up front; the sweep then runs one
    coefficient sieve per prime and evaluates every registered point from
    the same coefficient vector.
    """

    def __init__(self, fld: FieldParams, X: float, w: WeightFunction,
                 include_ramified: bool = True):
        self.fld = fld
        self.X = float(X)
        self.w = w
        t1, t2 = w.support
        allp = primary_primes_up_to(fld, t2 * X, include_ramified)
        self.primes: List[PrimaryPrime] = [q for q in allp if q.norm > t1 * X]
        self.weights = np.array([w(q.norm / X) for q in self.primes])
        self.lambdas = np.array([math.log(q.p if q.kind != "inert" else q.p ** 2)
                                 for q in self.primes])
        self._values: Dict[Tuple[complex, bool], np.ndarray] = {}
        self._errors: Dict[Tuple[complex, bool], np.ndarray] = {}

    def n_primes(self) -> int:
        return len(self.primes)

    def run(self, points: Sequence[Tuple[complex, bool]], t0: float = 1.0,
            block: int = 96) -> None:
        """Evaluate L (and optionally L') at each (s, want_deriv) point.

        Primes are processed in blocks: the per-prime coefficient vectors
        are concatenated and each registered point is evaluated with one
        interpolation pass plus segmented sums over the block.
        """
        from .lfunctions import chi_coefficients_for
        todo = [p for p in points if (complex(p[0]), p[1]) not in self._values]
        if not todo:
            return
        fld = self.fld
        nP = len(self.primes)
        if nP == 0:
            for s, wd in todo:
                self._values[(complex(s), wd)] = np.zeros(0, dtype=np.complex128)
                self._errors[(complex(s), wd)] = np.zeros(0)
                if wd:
                    self._values[(complex(s), "deriv")] = np.zeros(0, dtype=np.complex128)
            return
        C_max = conductor_scale(fld, max(q.norm for q in self.primes))
        M_max = afe_cutoff(fld, C_max, t0)
        ctxs = [AfeContext(fld, s, M_max, t0=t0, deriv=wd) for s, wd in todo]
        vals = [np.empty(nP, dtype=np.complex128) for _ in todo]
        ders = [np.empty(nP, dtype=np.complex128) for _ in todo]
        errs = [np.empty(nP) for _ in todo]
        for lo in range(0, nP, block):
            chunk = self.primes[lo:lo + block]
            Cs = np.array([conductor_scale(fld, q.norm) for q in chunk])
            Ms = [min(afe_cutoff(fld, C, t0), M_max) for C in Cs]
            nus, avs = [], []
            for q, M in zip(chunk, Ms):
                a = chi_coefficients_for(fld, q, M)
                nz = np.nonzero(a)[0]        # nu = 1 is always present
                nus.append(nz)
                avs.append(a[nz].astype(np.float64))
            av = np.concatenate(avs)
            nu = np.concatenate(nus)
            crep = np.concatenate([np.full(len(z), C)
                                   for C, z in zip(Cs, nus)])
            lens = [len(z) for z in nus]
            starts = np.zeros(len(chunk), dtype=np.intp)
            np.cumsum(lens[:-1], out=starts[1:])
            nuf = nu.astype(np.float64)
            if fld.is_rational:
                base = (nuf / crep) ** 2
                y1, y2 = base * t0, base / t0
            else:
                y1, y2 = nuf * (t0 / crep), nuf / (crep * t0)
            for j, (s, wd) in enumerate(todo):
                ctx = ctxs[j]
                K1 = ctx.grid1.eval(y1)
                K2 = ctx.grid2.eval(y2)
                t1 = av * ctx.pw1[nu]
                t2 = av * ctx.pw2[nu]
                S1 = np.add.reduceat(t1 * K1, starts)
                S2 = np.add.reduceat(t2 * K2, starts)
                rho = np.exp((1.0 - 2.0 * ctx.s) * np.log(Cs))
                vals[j][lo:lo + len(chunk)] = S1 + rho * S2
                a1 = np.add.reduceat(np.abs(t1), starts)
                a2 = np.add.reduceat(np.abs(t2), starts)
                errs[j][lo:lo + len(chunk)] = (_tail_bounds_vec(ctx, Cs, Ms)
                                               + 1e-13 * (a1 + np.abs(rho) * a2))
                if wd:
                    dK1 = ctx.grid1.eval(y1, deriv=True)
                    if not ctx._ds_mode:
                        dK1 = ctx._half * dK1
                    dK2 = ctx.grid2.eval(y2, deriv=True)
                    ln = ctx.lognu[nu]
                    dS1 = np.add.reduceat(t1 * (dK1 - ln * K1), starts)
                    dS2 = np.add.reduceat(t2 * (ln * K2 + dK2), starts)
                    ders[j][lo:lo + len(chunk)] = (
                        dS1 + rho * (-2.0 * np.log(Cs) * S2 + dS2))
        for j, (s, wd) in enumerate(todo):
            key = (complex(s), wd)
            self._values[key] = vals[j]
            self._errors[key] = errs[j]
            if wd:
                self._values[(complex(s), "deriv")] = ders[j]

    def L(self, s: complex) -> np.ndarray:
        key = (complex(s), False)
        if key not in self._values:
            key = (complex(s), True)
        return self._values[key]

    def Lprime(self, s: complex) -> np.ndarray:
        return self._values[(complex(s), "deriv")]

    def err(self, s: complex) -> np.ndarray:
        key = (complex(s), False)
        if key not in self._errors:
            key = (complex(s), True)
        return self._errors[key]


def _csum(terms: np.ndarray) -> complex:
    return complex(math.fsum(terms.real), math.fsum(terms.imag))


def _tail_bounds_vec(ctx: AfeContext, Cs: np.ndarray, Ms) -> np.ndarray:
    """Vectorized first-omitted-band bound across a block of primes."""
    from .afe import Y_CUT, gamma_q
    Ms = np.asarray(Ms, dtype=np.float64)
    tmin = min(ctx.t0, 1.0 / ctx.t0)
    if ctx.fld.is_rational:
        y = ((Ms + 1.0) / Cs) ** 2 * tmin
    else:
        y = (Ms + 1.0) * tmin / Cs
    y = np.minimum(np.maximum(y, 1e-8), Y_CUT - 1e-9)
    qv = np.abs(gamma_q(ctx.grid1.a, y))
    sig = ctx.s.real
    return 8.0 * Cs * qv * (Ms + 1.0) ** (-min(sig, 1.0 - sig))


# --------------------------------------------------------------------------
# statistics
# --------------------------------------------------------------------------

def _sweep_for(fld, X, w, include_ramified, sweep):
    return sweep if sweep is not None else FamilySweep(fld, X, w, include_ramified)


def ratio_lhs(X: float, shifts: ShiftPoint, w: WeightFunction,
              fld: FieldParams, sweep: Optional[FamilySweep] = None,
              zero_tol: float = 1e-12) -> Tuple[complex, int, int, float]:
    """sum Lambda(pi) L(1/2+alpha)/L(1/2+beta) w(N(pi)/X).

    Returns (value, n_terms, skips, est_error); a numerically vanishing
    denominator skips the term and counts it.
    """
    sw = _sweep_for(fld, X, w, True, sweep)
    sa, sb = 0.5 + shifts.alpha, 0.5 + shifts.beta
    sw.run([(sa, False), (sb, False)])
    num, den = sw.L(sa), sw.L(sb)
    good = np.abs(den) > zero_tol
    skips = int(len(den) - good.sum())
    terms = sw.lambdas[good] * sw.weights[good] * num[good] / den[good]
    est = float(np.sum(sw.lambdas[good] * sw.weights[good] *
                       (sw.err(sa)[good] + sw.err(sb)[good]) /
                       np.maximum(np.abs(den[good]), zero_tol)))
    return _csum(terms), int(good.sum()), skips, est


def ratio_main(X: float, shifts: ShiftPoint, w: WeightFunction,
               fld: FieldParams) -> Tuple[complex, complex]:
    """The two main terms of the shifted-ratio asymptotic."""
    a, b = complex(shifts.alpha), complex(shifts.beta)
    if a == b or a == -b:
        raise ZetaPoleError("shift collision: alpha = +/-beta hits the "
                            "zeta_K^(2) pole at argument 1")
    m1 = X * w.mellin(1.0) * zeta_K2(1 + 2 * a, fld) / zeta_K2(1 + a + b, fld)
    m2 = (X ** (1 - a) * w.mellin(1 - a) * fld.B_K ** (-a)
          * gamma_K(fld, 0.5 + a)
          * zeta_K2(1 - 2 * a, fld) / zeta_K2(1 - a + b, fld))
    return complex(m1), complex(m2)


def ratio_moment(X: float, shifts: ShiftPoint, w: WeightFunction,
                 fld: FieldParams, sweep: Optional[FamilySweep] = None) -> MomentReport:
    t_start = time.perf_counter()
    lhs, n, skips, est = ratio_lhs(X, shifts, w, fld, sweep)
    m1, m2 = ratio_main(X, shifts, w, fld)
    rep = MomentReport(theorem="ratios", d=fld.d, X=X, alpha=shifts.alpha,
                       beta=shifts.beta, lhs=lhs, main_terms=[m1, m2],
                       n_terms=n, skips=skips, est_error=est,
                       seconds=time.perf_counter() - t_start)
    return rep.finalize()


def first_moment(X: float, alpha: complex, w: WeightFunction,
                 fld: FieldParams, sweep: Optional[FamilySweep] = None) -> MomentReport:
    """First moment: sum Lambda(pi) L(1/2+alpha) w(N/X) against its two
    main terms."""
    t_start = time.perf_counter()
    a = complex(alpha)
    if a == 0:
        raise ValueError("alpha = 0 is the central moment; use central_moment")
    sw = _sweep_for(fld, X, w, True, sweep)
    s = 0.5 + a
    sw.run([(s, False)])
    terms = sw.lambdas * sw.weights * sw.L(s)
    lhs = _csum(terms)
    est = float(np.sum(sw.lambdas * sw.weights * sw.err(s)))
    m1 = X * w.mellin(1.0) * zeta_K2(1 + 2 * a, fld)
    m2 = (X ** (1 - a) * w.mellin(1 - a) * fld.B_K ** (-a)
          * gamma_K(fld, 0.5 + a) * zeta_K2(1 - 2 * a, fld))
    rep = MomentReport(theorem="first-moment", d=fld.d, X=X, alpha=a,
                       lhs=lhs, main_terms=[complex(m1), complex(m2)],
                       n_terms=sw.n_primes(), est_error=est,
                       seconds=time.perf_counter() - t_start)
    return rep.finalize()


def central_main_limit(X: float, w: WeightFunction, fld: FieldParams,
                       alpha_small: float = 1e-3) -> Tuple[complex, complex, float]:
    """Main term X Q(log X) of the central first moment, two ways: the
    alpha -> 0 even-extrapolation of the two shifted main terms (their
    poles cancel), and the closed-form limit through the Laurent data of
    zeta_K^(2).  Returns (extrapolated, closed_form, spread), where spread
    measures the extrapolation stability across step sizes."""
    def main_sum(a):
        m1 = X * w.mellin(1.0) * zeta_K2(1 + 2 * a, fld)
        m2 = (X ** (1 - a) * w.mellin(1 - a) * fld.B_K ** (-a)
              * gamma_K(fld, 0.5 + a) * zeta_K2(1 - 2 * a, fld))
        return m1 + m2

    def even_avg(h):
        return 0.5 * (main_sum(h) + main_sum(-h))

    def richardson(h):
        # even average is limit + O(h^2); eliminate the h^2 term
        return (4.0 * even_avg(h) - even_avg(2 * h)) / 3.0

    ext = richardson(alpha_small)
    spread = abs(richardson(alpha_small * 3) - ext)
    R2, c0, c1 = laurent_zeta_K2(fld.d)
    w1 = w.mellin(1.0)
    LX = math.log(X)
    dlg = dlog_gamma_K(fld, 0.5)
    lead = 0.5 * R2 * w1 * (LX + w.log_moment(1) / w1.real + math.log(fld.B_K) - dlg)
    closed = X * (lead + 2.0 * c0 * w1)
    return complex(ext), complex(closed), float(spread)


def central_moment(X: float, w: WeightFunction, fld: FieldParams,
                   sweep: Optional[FamilySweep] = None) -> MomentReport:
    """Central first moment (alpha = 0): LHS against X Q(log X)."""
    t_start = time.perf_counter()
    sw = _sweep_for(fld, X, w, True, sweep)
    sw.run([(0.5, False)])
    lhs = _csum(sw.lambdas * sw.weights * sw.L(0.5))
    est = float(np.sum(sw.lambdas * sw.weights * sw.err(0.5)))
    ext, closed, spread = central_main_limit(X, w, fld)
    if abs(ext - closed) > 1e-6 * max(abs(closed), 1.0):
        raise ArithmeticError(
            f"central main-term extrapolation unstable: {ext} vs {closed}")
    rep = MomentReport(theorem="central-moment", d=fld.d, X=X, lhs=lhs,
                       main_terms=[ext], n_terms=sw.n_primes(), est_error=est,
                       seconds=time.perf_counter() - t_start,
                       extras={"main_closed_form": closed,
                               "extrapolation_spread": spread})
    return rep.finalize()


def negative_moment(X: float, beta: complex, w: WeightFunction,
                    fld: FieldParams, sweep: Optional[FamilySweep] = None,
                    zero_tol: float = 1e-12) -> MomentReport:
    """Negative first moment: sum Lambda(pi) w(N/X) / L(1/2+beta) against
    X what-hat(1)."""
    t_start = time.perf_counter()
    b = complex(beta)
    if b.real <= 0:
        raise ValueError("negative moment needs Re(beta) > 0")
    sw = _sweep_for(fld, X, w, True, sweep)
    s = 0.5 + b
    sw.run([(s, False)])
    den = sw.L(s)
    good = np.abs(den) > zero_tol
    skips = int(len(den) - good.sum())
    lhs = _csum(sw.lambdas[good] * sw.weights[good] / den[good])
    est = float(np.sum(sw.lambdas[good] * sw.weights[good] * sw.err(s)[good]
                       / np.abs(den[good]) ** 2))
    rep = MomentReport(theorem="negative-moment", d=fld.d, X=X, beta=b,
                       lhs=lhs, main_terms=[X * w.mellin(1.0)],
                       n_terms=int(good.sum()), skips=skips, est_error=est,
                       seconds=time.perf_counter() - t_start)
    return rep.finalize()


def _zeta2_logderiv_cdiff(s0: complex, fld: FieldParams,
                          h: float = 1e-6) -> Tuple[complex, float]:
    """(zeta_K^(2))'(s0) / zeta_K^(2)(s0) by central differences at step h,
    cross-checked at 10h; returns (value, step_consistency)."""
    def ld(hh):
        zp = zeta_K2(s0 + hh, fld)
        zm = zeta_K2(s0 - hh, fld)
        return (zp - zm) / (2 * hh) / zeta_K2(s0, fld)
    v1, v10 = ld(h), ld(10 * h)
    return complex(v1), abs(v1 - v10)


def logderiv_moment(X: float, r: complex, w: WeightFunction,
                    fld: FieldParams, sweep: Optional[FamilySweep] = None,
                    zero_tol: float = 1e-12) -> MomentReport:
    """Log-derivative moment: sum Lambda(pi) (L'/L)(1/2+r) w(N/X).

    The second main term carries 1/Res_{s=1} zeta_K^(2)(s); the variant
    with 1/r_K (the residue of the full zeta_K) is recorded in the extras
    for comparison — only the former cancels the u = 0 pole in the
    density integral downstream.
    """
    t_start = time.perf_counter()
    rr = complex(r)
    if not (0 < rr.real < 0.5):
        raise ValueError("log-derivative moment needs 0 < Re(r) < 1/2")
    sw = _sweep_for(fld, X, w, True, sweep)
    s = 0.5 + rr
    sw.run([(s, True)])
    L, Lp = sw.L(s), sw.Lprime(s)
    good = np.abs(L) > zero_tol
    skips = int(len(L) - good.sum())
    lhs = _csum(sw.lambdas[good] * sw.weights[good] * Lp[good] / L[good])
    est = float(np.sum(sw.lambdas[good] * sw.weights[good] * sw.err(s)[good]
                       * (1.0 + np.abs(Lp[good])) / np.abs(L[good])))
    zld, zld_check = _zeta2_logderiv_cdiff(1 + 2 * rr, fld)
    m1 = X * w.mellin(1.0) * zld
    R2 = fld.r_K * fld.residue2_factor
    base = (X ** (1 - rr) * w.mellin(1 - rr) * gamma_K(fld, 0.5 + rr)
            * zeta_K2(1 - 2 * rr, fld) * fld.B_K ** (-rr))
    m2 = -base / R2
    rep = MomentReport(theorem="logderiv-moment", d=fld.d, X=X, alpha=rr,
                       lhs=lhs, main_terms=[complex(m1), complex(m2)],
                       n_terms=int(good.sum()), skips=skips, est_error=est,
                       seconds=time.perf_counter() - t_start,
                       extras={"main2_rK_variant": complex(-base / fld.r_K),
                               "zld_step_consistency": zld_check})
    return rep.finalize()


def fit_error_exponent(Xs: Sequence[float],
                       residuals: Sequence[float]) -> Tuple[float, np.ndarray]:
    """Least-squares slope of log|residual| against log X; returns the
    slope and the per-point regression residuals."""
    Xs = np.asarray(Xs, dtype=np.float64)
    res = np.abs(np.asarray(residuals, dtype=np.float64))
    if len(Xs) < 4:
        raise ValueError("need at least 4 report points")
    if np.any(res == 0):
        raise ValueError("zero residual in exponent fit")
    lx, lr = np.log(Xs), np.log(res)
    if np.ptp(lx) < 1e-9:
        raise ValueError("degenerate X grid")
    A = np.vstack([lx, np.ones_like(lx)]).T
    coef, *_ = np.linalg.lstsq(A, lr, rcond=None)
    fit = A @ coef
    return float(coef[0]), lr - fit
