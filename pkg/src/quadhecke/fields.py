"""Base-field descriptors for the nine class-number-one imaginary quadratic
fields and for the rationals.

Everything downstream (ring arithmetic, characters, L-functions, moments,
densities) is parameterized by a single immutable :class:`FieldParams`
descriptor.  The rationals are carried through the same code path with
``d_K = 1``, norm = absolute value and "primary" = positive odd integer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Tuple

import numpy as np
from scipy.special import loggamma

#: Discriminant selectors of the nine imaginary quadratic fields of class
#: number one.
CLASS_NUMBER_ONE_D = (-1, -2, -3, -7, -11, -19, -43, -67, -163)

#: Sentinel selector for the rational field.
RATIONAL = 0

#: All supported selectors.
ALL_FIELDS = CLASS_NUMBER_ONE_D + (RATIONAL,)


class UnsupportedFieldError(ValueError):
    """Raised for any selector outside the supported list."""


class GammaPoleError(ArithmeticError):
    """Raised when the numerator gamma factor of ``gamma_K`` hits a pole."""


@dataclass(frozen=True)
class FieldParams:
    """All per-field constants.

    Coordinates of ring elements are taken with respect to the integral
    basis (1, omega); for the rationals the second coordinate is always 0.
    """

    d: int                      # selector: member of CLASS_NUMBER_ONE_D, or RATIONAL
    D_K: int                    # discriminant (1 for the rationals)
    d_K: int                    # field degree over the rationals
    tr_omega: int               # trace of omega
    nm_omega: int               # norm of omega
    c_coords: Tuple[int, int]   # the auxiliary modulus factor c_K as (a, b)
    norm_cK: int                # N(c_K)
    B_K: float                  # |D_K| N(c_K) / pi  (rationals), / (2 pi)^2 otherwise
    units: Tuple[Tuple[int, int], ...]   # unit group, canonical order
    two_norms: Tuple[int, ...]  # norms of the prime ideals above 2
    r_K: float = field(default=0.0, compare=False)   # residue of zeta_K at 1

    @property
    def is_rational(self) -> bool:
        return self.d == RATIONAL

    @property
    def sqrtD_branch(self) -> complex:
        """sqrt(D_K) with the principal branch i*sqrt(|D_K|) for D_K < 0."""
        if self.is_rational:
            return complex(1.0)
        return 1j * math.sqrt(abs(self.D_K))

    @property
    def n_units(self) -> int:
        return len(self.units)

    @property
    def residue2_factor(self) -> float:
        """prod over primes above 2 of (1 - 1/N(p)); relates r_K to the
        residue of the 2-removed Dedekind zeta function."""
        out = 1.0
        for n in self.two_norms:
            out *= 1.0 - 1.0 / n
        return out

    def euler2_factor(self, s: complex) -> complex:
        """prod over primes above 2 of (1 - N(p)^(-s))."""
        out = 1.0 + 0.0j
        for n in self.two_norms:
            out *= 1.0 - np.exp(-s * math.log(n))
        return out


def _units_for(d: int) -> Tuple[Tuple[int, int], ...]:
    # Canonical orders: powers of i for d=-1, powers of omega for d=-3.
    if d == -1:
        return ((1, 0), (0, 1), (-1, 0), (0, -1))
    if d == -3:
        # omega = (1+sqrt(-3))/2 is a primitive sixth root of unity;
        # omega^2 = omega - 1, omega^3 = -1.
        return ((1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1))
    return ((1, 0), (-1, 0))


def _two_splitting(D: int) -> Tuple[int, ...]:
    if D == 1:
        return (2,)
    if D % 2 == 0:
        return (2,)            # ramified
    if D % 8 == 1:
        return (2, 2)          # split
    return (4,)                # inert


@lru_cache(maxsize=None)
def field_constants(d: int) -> FieldParams:
    """Build the immutable descriptor for selector ``d``.

    ``d`` must be one of the nine class-number-one values or ``RATIONAL``.
    The residue r_K is computed numerically (see lfunctions.residue_rK),
    not hard-coded.
    """
    if d == RATIONAL:
        params = FieldParams(
            d=RATIONAL, D_K=1, d_K=1, tr_omega=0, nm_omega=0,
            c_coords=(8, 0), norm_cK=8, B_K=8.0 / math.pi,
            units=((1, 0), (-1, 0)), two_norms=(2,),
        )
    elif d in CLASS_NUMBER_ONE_D:
        if d % 4 == 1:         # d ≡ 1 (mod 4)
            D, tr, nm = d, 1, (1 - d) // 4
        else:
            D, tr, nm = 4 * d, 0, -d
        if d == -1:
            c = (-4, -4)       # (1+i)^5
        elif d == -2:
            c = (0, 4)         # 4*sqrt(-2)
        else:
            c = (8, 0)
        norm_c = c[0] ** 2 + c[0] * c[1] * tr + c[1] ** 2 * nm
        params = FieldParams(
            d=d, D_K=D, d_K=2, tr_omega=tr, nm_omega=nm,
            c_coords=c, norm_cK=norm_c,
            B_K=abs(D) * norm_c / (2.0 * math.pi) ** 2,
            units=_units_for(d), two_norms=_two_splitting(D),
        )
    else:
        raise UnsupportedFieldError(f"unsupported field selector d={d}")

    from . import lfunctions   # deferred: lfunctions imports this module
    object.__setattr__(params, "r_K", lfunctions.residue_rK(params))
    return params


def gamma_K(fld: FieldParams, s: complex) -> complex:
    """The gamma-factor ratio entering the functional equation:
    Gamma((1-s)/2)/Gamma(s/2) for the rationals, Gamma(1-s)/Gamma(s)
    otherwise.  Satisfies gamma_K(s) * gamma_K(1-s) = 1 away from poles.
    """
    s = complex(s)
    num, den = ((1 - s) / 2, s / 2) if fld.is_rational else (1 - s, s)
    for arg, sign in ((num, +1), (den, -1)):
        if arg.imag == 0 and arg.real <= 0 and arg.real == int(arg.real):
            if sign > 0:
                raise GammaPoleError(f"gamma_K pole at s={s}")
            return 0.0 + 0.0j      # pole in the denominator: the ratio vanishes
    return complex(np.exp(loggamma(num) - loggamma(den)))


def dlog_gamma_K(fld: FieldParams, s: complex) -> complex:
    """Logarithmic derivative d/ds log gamma_K(s)."""
    from scipy.special import psi
    s = complex(s)
    if fld.is_rational:
        return -0.5 * psi((1 - s) / 2) - 0.5 * psi(s / 2)
    return -psi(1 - s) - psi(s)
