"""Exact arithmetic in the ring of integers O_K.

Elements are stored as integer coordinate pairs (a, b) with respect to the
basis (1, omega); rational-field elements keep b = 0.  Residue reduction
goes through the column HNF of the two-dimensional lattice of the modulus
ideal, which works uniformly in all nine fields (four of them are not
norm-Euclidean, so there is no division algorithm to lean on).

All operations are pure and all values immutable; prime streams can be
regenerated per worker from disjoint rational-prime ranges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from math import gcd, isqrt
from typing import Dict, Iterator, List, Optional, Tuple

from .fields import FieldParams, field_constants

__all__ = [
    "QuadInt", "PrimaryPrime", "ResidueRing",
    "norm", "reduce_mod", "powmod", "splitting_type", "cornacchia",
    "to_primary", "is_primary", "primary_primes_up_to",
    "lambda_K", "mu_K", "factor_element", "is_prime_element",
    "primes_up_to", "jacobi", "kronecker", "tonelli_shanks",
]


# --------------------------------------------------------------------------
# rational integer helpers
# --------------------------------------------------------------------------

def primes_up_to(n: int) -> List[int]:
    """Sieve of Eratosthenes, inclusive."""
    if n < 2:
        return []
    sieve = bytearray(b"\x01") * (n + 1)
    sieve[:2] = b"\x00\x00"
    for p in range(2, isqrt(n) + 1):
        if sieve[p]:
            start = p * p
            sieve[start:n + 1:p] = b"\x00" * ((n - start) // p + 1)
    return [i for i, v in enumerate(sieve) if v]


def jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a/n) for odd positive n."""
    if n <= 0 or n % 2 == 0:
        raise ValueError("jacobi requires odd positive n")
    a %= n
    t = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                t = -t
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            t = -t
        a %= n
    return t if n == 1 else 0


def kronecker(D: int, n: int) -> int:
    """Kronecker symbol (D/n), n >= 0."""
    if n == 0:
        return 1 if D in (1, -1) else 0
    t = 1
    if n < 0:
        n = -n
        if D < 0:
            t = -t
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if D % 2 == 0:
            return 0
        if v % 2 == 1 and D % 8 in (3, 5):
            t = -t
    return t * jacobi(D % n, n) if n > 1 else t


def tonelli_shanks(n: int, p: int) -> int:
    """Square root of n modulo an odd prime p (smallest-generator search,
    hence deterministic).  Raises if n is not a residue."""
    n %= p
    if n == 0:
        return 0
    if jacobi(n, p) != 1:
        raise ValueError(f"{n} is not a quadratic residue mod {p}")
    if p % 4 == 3:
        return pow(n, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while jacobi(z, p) != -1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(n, q, p), pow(n, (q + 1) // 2, p)
    while t != 1:
        i, e = 0, t
        while e != 1:
            e = e * e % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r


# --------------------------------------------------------------------------
# elements
# --------------------------------------------------------------------------

class QuadInt:
    """An element a + b*omega of O_K with exact integer coordinates."""

    __slots__ = ("a", "b", "field")

    def __init__(self, a: int, b: int = 0, fld: Optional[FieldParams] = None):
        if fld is None:
            raise ValueError("QuadInt needs a field descriptor")
        if fld.is_rational and b != 0:
            raise ValueError("rational-field elements have b = 0")
        self.a = int(a)
        self.b = int(b)
        self.field = fld

    # -- basic structure ---------------------------------------------------

    def __repr__(self):
        if self.field.is_rational:
            return f"QuadInt({self.a})"
        return f"QuadInt({self.a}, {self.b}; d={self.field.d})"

    def __hash__(self):
        return hash((self.a, self.b, self.field.d))

    def __eq__(self, other):
        if not isinstance(other, QuadInt):
            return NotImplemented
        return (self.a, self.b, self.field.d) == (other.a, other.b, other.field.d)

    def __neg__(self):
        return QuadInt(-self.a, -self.b, self.field)

    def __add__(self, other):
        return QuadInt(self.a + other.a, self.b + other.b, self.field)

    def __sub__(self, other):
        return QuadInt(self.a - other.a, self.b - other.b, self.field)

    def __mul__(self, other):
        f = self.field
        if isinstance(other, int):
            return QuadInt(self.a * other, self.b * other, f)
        a, b, c, e = self.a, self.b, other.a, other.b
        # omega^2 = tr(omega)*omega - nm(omega)
        return QuadInt(a * c - b * e * f.nm_omega,
                       a * e + b * c + b * e * f.tr_omega, f)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative exponent")
        out = QuadInt(1, 0, self.field)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    # -- field-aware quantities ---------------------------------------------

    def conj(self) -> "QuadInt":
        if self.field.is_rational:
            return self
        f = self.field
        return QuadInt(self.a + self.b * f.tr_omega, -self.b, f)

    def norm(self) -> int:
        f = self.field
        if f.is_rational:
            return abs(self.a)
        return self.a * self.a + self.a * self.b * f.tr_omega + self.b * self.b * f.nm_omega

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_unit(self) -> bool:
        return self.norm() == 1

    def is_odd(self) -> bool:
        """Coprime to 2."""
        f = self.field
        if f.is_rational:
            return self.a % 2 != 0
        if f.two_norms == (4,):                 # 2 inert
            return not (self.a % 2 == 0 and self.b % 2 == 0)
        # 2 split or ramified: odd iff norm is odd ... except split, where
        # norm odd iff coprime to both primes above 2.  Norm parity decides
        # in every case here.
        return self.norm() % 2 != 0

    def divides(self, other: "QuadInt") -> bool:
        """Exact divisibility test: self | other in O_K."""
        n = self.norm()
        if n == 0:
            return other.is_zero()
        if self.field.is_rational:
            return other.a % self.a == 0
        prod = other * self.conj()
        return prod.a % n == 0 and prod.b % n == 0

    def exact_div(self, other: "QuadInt") -> "QuadInt":
        """other / self, assuming divisibility."""
        n = self.norm()
        if self.field.is_rational:
            return QuadInt(other.a // self.a, 0, self.field)
        prod = other * self.conj()
        if prod.a % n or prod.b % n:
            raise ValueError("exact_div: not divisible")
        return QuadInt(prod.a // n, prod.b // n, self.field)


def norm(x: QuadInt) -> int:
    return x.norm()


def one(fld: FieldParams) -> QuadInt:
    return QuadInt(1, 0, fld)


def units(fld: FieldParams) -> Tuple[QuadInt, ...]:
    return tuple(QuadInt(a, b, fld) for a, b in fld.units)


def c_K(fld: FieldParams) -> QuadInt:
    return QuadInt(fld.c_coords[0], fld.c_coords[1], fld)


def omega(fld: FieldParams) -> QuadInt:
    return QuadInt(0, 1, fld)


# --------------------------------------------------------------------------
# residue reduction without Euclidean division
# --------------------------------------------------------------------------

class ResidueRing:
    """O_K/(m) with canonical representatives in the HNF fundamental box.

    The lattice of the ideal (m) has the Z-basis {m, m*omega}; its column
    HNF is [[e, f], [0, g]] with e*g = N(m), 0 <= f < e.  The canonical
    representative of x has coordinates in [0, e) x [0, g).
    """

    def __init__(self, m: QuadInt):
        if m.is_zero():
            raise ZeroDivisionError("zero modulus")
        self.modulus = m
        self.field = m.field
        if self.field.is_rational:
            self.e, self.f, self.g = abs(m.a), 0, 1
            self.size = abs(m.a)
            return
        c1 = (m.a, m.b)
        momega = m * omega(self.field)
        c2 = (momega.a, momega.b)
        b1, b2 = c1[1], c2[1]
        if b1 == 0 and b2 == 0:
            raise AssertionError("degenerate ideal lattice")
        g = gcd(b1, b2)
        # u*b1 + v*b2 = g
        u, v = _ext_gcd(b1, b2, g)
        fa = u * c1[0] + v * c2[0]
        ea = (b2 // g) * c1[0] - (b1 // g) * c2[0]
        e = abs(ea)
        self.e, self.g = e, abs(g)
        self.f = fa % e
        self.size = self.e * self.g
        assert self.size == m.norm()

    def reduce(self, x: QuadInt) -> QuadInt:
        if self.field.is_rational:
            return QuadInt(x.a % self.size, 0, self.field)
        j = x.b % self.g
        k = (x.b - j) // self.g
        xa = (x.a - k * self.f) % self.e
        return QuadInt(xa, j, self.field)

    def mul(self, x: QuadInt, y: QuadInt) -> QuadInt:
        return self.reduce(x * y)

    def pow(self, x: QuadInt, e: int) -> QuadInt:
        out = self.reduce(QuadInt(1, 0, self.field))
        base = self.reduce(x)
        while e:
            if e & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            e >>= 1
        return out

    def representatives(self) -> Iterator[QuadInt]:
        """One representative per residue class (the HNF box)."""
        if self.field.is_rational:
            for a in range(self.size):
                yield QuadInt(a, 0, self.field)
            return
        for i in range(self.e):
            for j in range(self.g):
                yield QuadInt(i, j, self.field)


def _ext_gcd(b1: int, b2: int, g: int) -> Tuple[int, int]:
    # returns (u, v) with u*b1 + v*b2 = g = gcd(b1, b2)
    old_r, r = b1, b2
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r == -g:
        old_s, old_t = -old_s, -old_t
    return old_s, old_t


def reduce_mod(x: QuadInt, m: QuadInt) -> QuadInt:
    """Canonical representative of x + (m); see ResidueRing."""
    return ResidueRing(m).reduce(x)


def powmod(a: QuadInt, e: int, m: QuadInt) -> QuadInt:
    """Canonical representative of a^e mod (m), square-and-multiply."""
    return ResidueRing(m).pow(a, e)


# --------------------------------------------------------------------------
# splitting, prime construction
# --------------------------------------------------------------------------

def splitting_type(p: int, fld: FieldParams) -> str:
    """Classify the rational prime p in O_K: 'split', 'inert' or 'ramified'."""
    if fld.is_rational:
        return "split"      # degree one: every prime has residue degree 1
    D = fld.D_K
    if p == 2:
        if D % 2 == 0:
            return "ramified"
        return "split" if D % 8 == 1 else "inert"
    k = kronecker(D, p)
    if k == 1:
        return "split"
    if k == -1:
        return "inert"
    return "ramified"


def ramified_prime(fld: FieldParams, p: int) -> QuadInt:
    """A prime element above the ramified rational prime p."""
    d = fld.d
    if d % 4 == 1:            # d ≡ 1 (mod 4): sqrt(d) = 2*omega - 1
        el = QuadInt(-1, 2, fld)
    else:
        el = QuadInt(0, 1, fld) if d != -1 else QuadInt(1, 1, fld)
    if p == 2:
        if d == -1:
            return QuadInt(1, 1, fld)
        if d == -2:
            return QuadInt(0, 1, fld)
        raise ValueError("2 is not ramified in this field")
    if el.norm() != p:
        raise ValueError(f"{p} is not ramified in d={fld.d}")
    return el


def _cornacchia_core(D: int, m: int, r: int) -> Optional[Tuple[int, int]]:
    # Euclidean descent for x^2 + D*y^2 = m starting from r^2 ≡ -D (mod m).
    a, b = m, r
    lim = isqrt(m)
    while b > lim:
        a, b = b, a % b
    c = m - b * b
    if c % D:
        return None
    y2, y = c // D, isqrt(c // D)
    if y * y != y2:
        return None
    return b, y


def cornacchia(p: int, fld: FieldParams) -> QuadInt:
    """An element of norm p for a split (or odd ramified) rational prime p,
    via Cornacchia's algorithm on the norm form; Tonelli-Shanks square
    roots make the output deterministic.  A bounded brute-force search
    backs up the composite-modulus branch."""
    if fld.is_rational:
        return QuadInt(p, 0, fld)
    kind = splitting_type(p, fld)
    if kind == "inert":
        raise ValueError(f"p={p} is inert in d={fld.d}: no norm-p element")
    if kind == "ramified":
        return ramified_prime(fld, p)
    d = fld.d
    absd = -d
    if d % 4 != 1:                               # norm form a^2 + |d| b^2
        r = tonelli_shanks((-absd) % p, p)
        if r < p - r:
            r = p - r
        sol = _cornacchia_core(absd, p, r)
        if sol is None:
            raise ArithmeticError(f"cornacchia failed for p={p}, d={d}")
        return QuadInt(sol[0], sol[1], fld)
    # d ≡ 1 (mod 4): (2a+b)^2 + |d| b^2 = 4p.  Even-b branch first.
    if p != absd:
        rp = tonelli_shanks((-absd) % p, p)
        if rp < p - rp:
            rp = p - rp
        sol = _cornacchia_core(absd, p, rp)
        if sol is not None:
            x, y = sol
            return QuadInt(x - y, 2 * y, fld)
        # odd-b branch: descent on 4p with an odd square root of -|d|
        for r0 in (rp, p - rp):
            r4 = r0 if r0 % 2 == 1 else r0 + p
            # r4 odd and r4^2 ≡ -|d| (mod 4p) because |d| ≡ 3 (mod 4)
            r4 %= 4 * p
            if r4 < 2 * p:
                r4 = 4 * p - r4
            sol = _cornacchia_core(absd, 4 * p, r4)
            if sol is not None and (sol[0] - sol[1]) % 2 == 0:
                u, v = sol
                return QuadInt((u - v) // 2, v, fld)
    # deterministic fallback: enumerate b
    for b in range(2 * isqrt(4 * p // absd) + 2):
        u2 = 4 * p - absd * b * b
        if u2 < 0:
            break
        u = isqrt(u2)
        if u * u == u2 and (u - b) % 2 == 0:
            return QuadInt((u - b) // 2, b, fld)
    raise ArithmeticError(f"no norm-{p} element found in d={d}")


# --------------------------------------------------------------------------
# primary normalization
# --------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _primary_data(d: int):
    """(ResidueRing of the defining modulus, frozenset of primary classes)."""
    fld = field_constants(d)
    if fld.is_rational:
        return None
    if d == -1:
        m = QuadInt(1, 1, fld) ** 3
        ring = ResidueRing(m)
        classes = frozenset({(ring.reduce(one(fld)).a, ring.reduce(one(fld)).b)})
        return ring, classes
    ring = ResidueRing(QuadInt(4, 0, fld))
    gen = QuadInt(1, 2, fld)                      # 1 + 2*omega
    if d == -3:
        base = [one(fld), gen]
    elif d == -2:
        G = [one(fld), QuadInt(-1, 2, fld)]
        base = [g * h for g in G for h in (one(fld), -QuadInt(1, 1, fld))]
    else:
        k = (d - 1) // 4
        if k % 2 == 0:
            G = [one(fld)]
        else:
            G = [one(fld), QuadInt(k, 1, fld), QuadInt(k + 1, -1, fld)]
        base = [g * h for g in G for h in (one(fld), gen)]
    classes = frozenset((ring.reduce(x).a, ring.reduce(x).b) for x in base)
    return ring, classes


def is_primary(x: QuadInt) -> bool:
    fld = x.field
    if not x.is_odd():
        return False
    if fld.is_rational:
        return x.a > 0
    ring, classes = _primary_data(fld.d)
    r = ring.reduce(x)
    return (r.a, r.b) in classes


def to_primary(x: QuadInt) -> QuadInt:
    """The unique primary associate of an odd element.

    Raises on even input, and loudly if the number of qualifying
    associates is not exactly one (that would break Lemma-level
    assumptions downstream, so it is never silently patched up).
    """
    if x.is_zero():
        raise ValueError("to_primary(0)")
    if not x.is_odd():
        raise ValueError(f"to_primary needs an odd element, got {x!r}")
    fld = x.field
    if fld.is_rational:
        return QuadInt(abs(x.a), 0, fld)
    hits = [u * x for u in units(fld) if is_primary(u * x)]
    if len(hits) != 1:
        raise AssertionError(
            f"primary associate count {len(hits)} != 1 for {x!r}")
    return hits[0]


# --------------------------------------------------------------------------
# primes, factorization, Lambda_K and mu_K
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PrimaryPrime:
    """A primary prime element with its ideal data."""
    pi: QuadInt
    norm: int
    p: int            # rational prime below
    kind: str         # 'split' | 'inert' | 'ramified' | 'rational'


def primary_primes_up_to(fld: FieldParams, X: float,
                         include_ramified: bool = True) -> List[PrimaryPrime]:
    """One primary generator per prime ideal coprime to 2 with norm <= X.

    Split p: both conjugate ideals (norm p); inert p: the prime p itself
    (norm p^2); odd ramified p | D_K: included once when the flag is set.
    Primes above 2 are always excluded (the character modulus c_K*pi must
    stay odd on the pi side).
    """
    out: List[PrimaryPrime] = []
    if fld.is_rational:
        for p in primes_up_to(int(X)):
            if p != 2:
                out.append(PrimaryPrime(QuadInt(p, 0, fld), p, p, "rational"))
        return out
    for p in primes_up_to(int(X)):
        if p == 2:
            continue
        kind = splitting_type(p, fld)
        if kind == "split":
            pi = to_primary(cornacchia(p, fld))
            pib = to_primary(pi.conj())
            pair = sorted([pi, pib], key=lambda z: (z.a, z.b))
            out.extend(PrimaryPrime(z, p, p, "split") for z in pair)
        elif kind == "inert":
            if p * p <= X:
                out.append(PrimaryPrime(to_primary(QuadInt(p, 0, fld)),
                                        p * p, p, "inert"))
        elif include_ramified:
            out.append(PrimaryPrime(to_primary(ramified_prime(fld, p)),
                                    p, p, "ramified"))
    out.sort(key=lambda q: (q.norm, q.pi.a, q.pi.b))
    return out


def _factor_int(n: int) -> Dict[int, int]:
    out: Dict[int, int] = {}
    for p in (2, 3, 5):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    f = 7
    inc = (4, 2, 4, 2, 4, 6, 2, 6)
    i = 0
    while f * f <= n:
        if n % f == 0:
            out[f] = out.get(f, 0) + 1
            n //= f
        else:
            f += inc[i]
            i = (i + 1) % 8
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def factor_element(x: QuadInt) -> Tuple[QuadInt, List[Tuple[QuadInt, int]]]:
    """Factor x as unit * prod(prime^e); primes are not normalized, the
    quadratic symbol does not care about associates."""
    if x.is_zero():
        raise ValueError("cannot factor 0")
    fld = x.field
    if fld.is_rational:
        n = abs(x.a)
        fac = [(QuadInt(p, 0, fld), e) for p, e in sorted(_factor_int(n).items())]
        u = QuadInt(1 if x.a > 0 else -1, 0, fld)
        return u, fac
    rest = x
    fac: List[Tuple[QuadInt, int]] = []
    for p, ep in sorted(_factor_int(x.norm()).items()):
        kind = splitting_type(p, fld)
        if kind == "inert":
            if ep % 2:
                raise AssertionError("odd inert valuation in norm")
            e = ep // 2
            pi = QuadInt(p, 0, fld)
        elif kind == "ramified":
            e = ep
            pi = ramified_prime(fld, p)
        else:
            pi = cornacchia(p, fld)
            e = 0
            while pi.divides(rest):
                rest = pi.exact_div(rest)
                e += 1
            if e:
                fac.append((pi, e))
            pic = pi.conj()
            e2 = ep - e
            if e2:
                fac.append((pic, e2))
                for _ in range(e2):
                    rest = pic.exact_div(rest)
            continue
        if e:
            fac.append((pi, e))
            for _ in range(e):
                rest = pi.exact_div(rest)
    if not rest.is_unit():
        raise AssertionError(f"non-unit cofactor after factoring {x!r}")
    return rest, fac


def is_prime_element(x: QuadInt) -> bool:
    n = x.norm()
    if n <= 1:
        return False
    fld = x.field
    if fld.is_rational:
        return len(_factor_int(n)) == 1 and max(_factor_int(n).values()) == 1
    fac = _factor_int(n)
    if len(fac) == 1:
        p, e = next(iter(fac.items()))
        if e == 1:
            return True
        if e == 2 and splitting_type(p, fld) == "inert":
            return any((u * x).a == p and (u * x).b == 0
                       for u in units(fld))
    return False


def lambda_K(x: QuadInt) -> float:
    """Von Mangoldt on O_K: log N(pi) when (x) = (pi)^k, else 0."""
    if x.is_zero():
        raise ValueError("lambda_K(0)")
    if x.is_unit():
        return 0.0
    _, fac = factor_element(x)
    distinct = {(f.a, f.b) for f, _ in fac}
    if len(fac) == 1 or len(distinct) == 1:
        return math.log(fac[0][0].norm())
    return 0.0


def mu_K(x: QuadInt) -> int:
    """Moebius on O_K: (-1)^(number of prime ideal factors), 0 if not
    square-free."""
    if x.is_zero():
        raise ValueError("mu_K(0)")
    if x.is_unit():
        return 1
    _, fac = factor_element(x)
    if any(e > 1 for _, e in fac):
        return 0
    return -1 if len(fac) % 2 else 1


# --------------------------------------------------------------------------
# optional prime cache files
# --------------------------------------------------------------------------

def save_primes(path, fld: FieldParams, X: float, primes: List[PrimaryPrime]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# quadhecke-primes v1 d={fld.d} X={X}\n")
        for q in primes:
            fh.write(f"{q.pi.a} {q.pi.b} {q.norm}\n")


def load_primes(path, fld: FieldParams) -> List[PrimaryPrime]:
    out: List[PrimaryPrime] = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline()
        if not header.startswith("# quadhecke-primes v1"):
            raise ValueError("unrecognized prime cache header")
        if f"d={fld.d} " not in header + " ":
            raise ValueError("prime cache belongs to a different field")
        for line in fh:
            a, b, n = (int(t) for t in line.split())
            x = QuadInt(a, b, fld)
            if x.norm() != n:
                raise ValueError("corrupt prime cache entry")
            p = n if splitting_type_norm(n, fld) != "inert" else isqrt(n)
            out.append(PrimaryPrime(x, n, p,
                                    "rational" if fld.is_rational
                                    else splitting_type_norm(n, fld)))
    return out


def splitting_type_norm(n: int, fld: FieldParams) -> str:
    if fld.is_rational:
        return "rational"
    r = isqrt(n)
    if r * r == n and splitting_type(r, fld) == "inert":
        return "inert"
    return splitting_type(n, fld)
