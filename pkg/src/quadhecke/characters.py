"""Quadratic residue symbols, the Hecke characters chi^(c_K n), reciprocity
verification and brute-force Gauss sums.

The symbol is computed through Euler's criterion plus factorization of the
denominator; the reciprocity law is demoted from algorithm to verified
property (four of the nine fields are not norm-Euclidean, so a gcd-chain
evaluation has no division algorithm to stand on, and desk-scale moduli
are small enough not to care).

A fast residue-field path (Jacobi symbols after reducing the denominator
prime to its residue field) backs the hot loops in :mod:`quadhecke.kernels`;
it is cross-validated against the Euler-criterion definition in the tests
and never replaces it.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Dict, Tuple, Union

from .fields import FieldParams
from .ring import (PrimaryPrime, QuadInt, ResidueRing, c_K, factor_element,
                   is_primary, jacobi, one)

__all__ = [
    "symbol_prime", "symbol", "QuadraticCharacter", "reciprocity_defect",
    "gauss_sum", "GaussSum",
]


def _as_element(pi: Union[QuadInt, PrimaryPrime]) -> QuadInt:
    return pi.pi if isinstance(pi, PrimaryPrime) else pi


def symbol_prime(a: QuadInt, pi: Union[QuadInt, PrimaryPrime]) -> int:
    """Euler's criterion: (a/pi) ≡ a^((N(pi)-1)/2) (mod pi), in {-1, 0, 1}.

    ``pi`` must be an odd prime element.
    """
    pi = _as_element(pi)
    if not pi.is_odd():
        raise ValueError("symbol_prime: even modulus")
    ring = ResidueRing(pi)
    n = pi.norm()
    r = ring.pow(a, (n - 1) // 2)
    if r.is_zero():
        return 0
    if r == ring.reduce(one(a.field)):
        return 1
    if r == ring.reduce(-one(a.field)):
        return -1
    raise AssertionError("Euler criterion value is not 0 or ±1 mod pi")


def symbol(a: QuadInt, n: QuadInt) -> int:
    """(a/n) for odd n, extended multiplicatively over the factorization of
    n; (a/c) = 1 for units c."""
    if n.is_zero() or not n.is_odd():
        raise ValueError("symbol: denominator must be odd and nonzero")
    if n.is_unit():
        return 1
    _, fac = factor_element(n)
    out = 1
    for pi, e in fac:
        s = symbol_prime(a, pi)
        if s == 0:
            return 0
        if e % 2:
            out *= s
    return out


def symbol_prime_fast(a: QuadInt, pi: QuadInt) -> int:
    """Residue-field evaluation of (a/pi): map into F_p and take a Jacobi
    symbol (split/ramified: omega goes to a root of its minimal polynomial;
    inert: (a/pi) = (N(a)/p) via the Frobenius a^p ≡ conj(a))."""
    fld = pi.field
    if fld.is_rational:
        return jacobi(a.a % pi.a, abs(pi.a))
    n = pi.norm()
    r = math.isqrt(n)
    if r * r == n and pi.a % r == 0 and pi.b % r == 0:
        # inert: pi is an associate of the rational prime r
        return jacobi(a.norm() % r, r)
    p = n
    # split/ramified: omega ≡ root (mod pi) from pi.a + pi.b*omega ≡ 0
    inv = pow(pi.b % p, -1, p)
    root = (-pi.a * inv) % p
    return jacobi((a.a + a.b * root) % p, p)


class QuadraticCharacter:
    """The Hecke character chi^(c_K n): m -> (c_K n / m) for a primary n.

    Trivial on units, hence well-defined on ideals.  Values at prime
    arguments are memoized; the memo is only ever written with values that
    are pure functions of the key, so concurrent readers cannot observe
    torn state.
    """

    def __init__(self, fld: FieldParams, modulus: Union[QuadInt, PrimaryPrime]):
        m = _as_element(modulus)
        if not is_primary(m):
            raise ValueError("character modulus must be primary")
        self.field = fld
        self.modulus = m
        self.top = c_K(fld) * m           # the numerator c_K * n
        self._prime_memo: Dict[Tuple[int, int], int] = {}

    def value_prime(self, pi: Union[QuadInt, PrimaryPrime]) -> int:
        pi = _as_element(pi)
        key = (pi.a, pi.b)
        v = self._prime_memo.get(key)
        if v is None:
            v = symbol_prime(self.top, pi)
            self._prime_memo[key] = v
        return v

    def __call__(self, m: QuadInt) -> int:
        return self.value(m)

    def value(self, m: QuadInt) -> int:
        """chi(m) in {-1, 0, 1}; 0 whenever m shares a factor with 2 c_K n."""
        if m.is_zero():
            return 0
        if m.is_unit():
            return 1
        if not m.is_odd():
            return 0
        _, fac = factor_element(m)
        out = 1
        for pi, e in fac:
            s = self.value_prime(pi)
            if s == 0:
                return 0
            if e % 2:
                out *= s
        return out


def reciprocity_defect(n: QuadInt, m: QuadInt) -> int:
    """(n/m)(m/n)(-1)^[(N(n)-1)/2 * (N(m)-1)/2] for coprime primary odd n, m.

    The reciprocity law asserts this is identically +1; the test suites
    check exactly that.
    """
    if not (is_primary(n) and is_primary(m)):
        raise ValueError("reciprocity_defect needs primary inputs")
    if not (n.is_odd() and m.is_odd()):
        raise ValueError("reciprocity_defect needs odd inputs")
    g = _coprime_check(n, m)
    if not g:
        raise ValueError("reciprocity_defect needs coprime inputs")
    s1 = symbol(n, m)
    s2 = symbol(m, n)
    if s1 == 0 or s2 == 0:
        raise AssertionError("symbol vanished on coprime input")
    e = ((n.norm() - 1) // 2) * ((m.norm() - 1) // 2)
    return s1 * s2 * (-1 if e % 2 else 1)


def _coprime_check(n: QuadInt, m: QuadInt) -> bool:
    # ideal-level gcd test through norms and shared prime factors
    if math.gcd(n.norm(), m.norm()) == 1:
        return True
    _, fac = factor_element(n)
    return all(not pi.divides(m) and not pi.conj().divides(m) for pi, _ in fac)


# --------------------------------------------------------------------------
# Gauss sums
# --------------------------------------------------------------------------

@dataclass
class GaussSum:
    """Result of the brute-force Gauss sum g_K(chi^(c_K c))."""
    value: complex
    expected: float          # N(c_K c)^(1/2), the claimed exact value
    n_terms: int
    modulus_norm: int

    @property
    def abs_defect(self) -> float:
        return abs(self.value - self.expected)

    @property
    def unit_phase(self) -> complex:
        """value / |value|; anything other than +1 is a branch surprise
        worth recording, never silently fixing."""
        return self.value / abs(self.value)


def gauss_sum(c: QuadInt, fld: FieldParams, max_terms: int = 2_000_000) -> GaussSum:
    """Brute-force g_K(chi^(c_K c)) over a full residue system mod (c_K c).

    The residue system is the HNF fundamental box of the ideal lattice;
    the additive character reduces to exact integer data: for x in O_K,
    Tr(x conj(q) / (N(q) sqrt(D_K))) equals the omega-coordinate of
    x*conj(q) divided by N(q), independent of the branch of sqrt(D_K)
    up to the documented sign convention.
    """
    from . import kernels
    if not c.is_odd() or not is_primary(c):
        raise ValueError("gauss_sum: c must be odd and primary")
    from .ring import mu_K
    if mu_K(c) == 0:
        raise ValueError("gauss_sum: c must be square-free")
    q = c_K(fld) * c
    nq = q.norm()
    if nq > max_terms:
        raise ValueError(f"modulus norm {nq} exceeds max_terms={max_terms}")
    val, n_terms = kernels.gauss_sum_box(fld, q)
    return GaussSum(value=val, expected=math.sqrt(nq),
                    n_terms=n_terms, modulus_norm=nq)


def gauss_sum_reference(c: QuadInt, fld: FieldParams) -> complex:
    """Tiny-modulus reference path: same sum, evaluated through the
    definitional symbol and exact rational phases.  Only for tests."""
    q = c_K(fld) * c
    nq = q.norm()
    ring = ResidueRing(q)
    chi = QuadraticCharacter(fld, c)
    total = 0.0 + 0.0j
    if fld.is_rational:
        for x in range(nq):
            s = jacobi(q.a % x, x) if x % 2 == 1 else 0
            if s:
                total += s * cmath.exp(2j * math.pi * x / nq)
        return total
    qc = q.conj()
    for x in ring.representatives():
        s = chi.value(x)
        if s == 0:
            continue
        b = (x * qc).b % nq
        total += s * cmath.exp(2j * math.pi * b / nq)
    return total
