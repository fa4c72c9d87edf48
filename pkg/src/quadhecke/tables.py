"""Precomputed integer tables shared by the hot kernels.

Per field: the list of odd-norm prime ideals up to a bound, stored as flat
numpy arrays (rational prime, ideal norm, splitting kind, residue-field
root of omega).  Per bound: a smallest-prime-factor table.  Everything is
cached and grown geometrically so repeated sweeps do not rebuild.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from threading import Lock
from typing import Dict, Tuple

import numpy as np

from .fields import FieldParams
from .ring import primes_up_to, splitting_type, tonelli_shanks

# kind codes used across the kernels
SPLIT, INERT, RAMIFIED, RATIONAL_PRIME = 0, 1, 2, 3

_lock = Lock()
_ideal_cache: Dict[Tuple[int, int], "PrimeIdealTable"] = {}
_spf_cache: Dict[int, np.ndarray] = {}


@dataclass
class PrimeIdealTable:
    """Odd-norm prime ideals of norm <= bound, sorted by norm.

    Split rational primes contribute two rows (one per conjugate ideal,
    distinguished by the two roots of the minimal polynomial of omega);
    inert primes one row of norm p^2; odd ramified primes one row.
    Primes above 2 are omitted: the characters of interest vanish there.

    The dense maps (indexed by the rational prime p <= bound) drive the
    norm-level coefficient sieve: kind_of[p] is the splitting kind for
    every odd prime p (even those whose ideals have norm beyond the
    bound), -1 for p = 2; row1_of/row2_of point back into the row arrays.
    """
    bound: int
    prat: np.ndarray      # int64: rational prime under the ideal
    pnorm: np.ndarray     # int64: ideal norm (p or p^2)
    kind: np.ndarray      # int8: SPLIT/INERT/RAMIFIED/RATIONAL_PRIME
    root: np.ndarray      # int64: omega ≡ root (mod ideal); 0 for inert
    kind_of: np.ndarray   # int8, dense over p
    row1_of: np.ndarray   # int32, dense over p
    row2_of: np.ndarray   # int32, dense over p

    def __len__(self) -> int:
        return len(self.pnorm)


def spf_table(bound: int) -> np.ndarray:
    """Smallest-prime-factor sieve, index 0..bound (int32)."""
    key = 1 << max(10, (bound - 1).bit_length())
    with _lock:
        t = _spf_cache.get(key)
    if t is not None:
        return t
    n = key
    spf = np.zeros(n + 1, dtype=np.int32)
    spf[1] = 1
    for p in range(2, math.isqrt(n) + 1):
        if spf[p] == 0:
            spf[p * p::p][spf[p * p::p] == 0] = p
            spf[p] = p
    rest = np.nonzero(spf == 0)[0]
    spf[rest] = rest
    spf[0] = 0
    with _lock:
        _spf_cache[key] = spf
    return spf


def prime_ideal_table(fld: FieldParams, bound: int) -> PrimeIdealTable:
    key_bound = 1 << max(8, (int(bound) - 1).bit_length())
    key = (fld.d, key_bound)
    with _lock:
        t = _ideal_cache.get(key)
    if t is not None:
        return t
    t = _build_table(fld, key_bound)
    with _lock:
        _ideal_cache[key] = t
    return t


def _build_table(fld: FieldParams, bound: int) -> PrimeIdealTable:
    prat, pnorm, kind, root = [], [], [], []
    kind_of = np.full(bound + 1, -1, dtype=np.int8)
    if fld.is_rational:
        for p in primes_up_to(bound):
            if p == 2:
                continue
            kind_of[p] = RATIONAL_PRIME
            prat.append(p)
            pnorm.append(p)
            kind.append(RATIONAL_PRIME)
            root.append(0)
    else:
        t_om, D = fld.tr_omega, fld.D_K
        for p in primes_up_to(bound):
            if p == 2:
                continue
            s = splitting_type(p, fld)
            if s == "split":
                kind_of[p] = SPLIT
                sq = tonelli_shanks(D % p, p)
                inv2 = (p + 1) // 2
                r1 = (t_om + sq) * inv2 % p
                r2 = (t_om - sq) * inv2 % p
                for r in sorted((r1, r2)):
                    prat.append(p)
                    pnorm.append(p)
                    kind.append(SPLIT)
                    root.append(r)
            elif s == "inert":
                kind_of[p] = INERT
                if p * p <= bound:
                    prat.append(p)
                    pnorm.append(p * p)
                    kind.append(INERT)
                    root.append(0)
            else:
                kind_of[p] = RAMIFIED
                prat.append(p)
                pnorm.append(p)
                kind.append(RAMIFIED)
                root.append(t_om * ((p + 1) // 2) % p)
    prat = np.asarray(prat, dtype=np.int64)
    pnorm = np.asarray(pnorm, dtype=np.int64)
    kind = np.asarray(kind, dtype=np.int8)
    root = np.asarray(root, dtype=np.int64)
    order = np.lexsort((root, pnorm))
    prat, pnorm, kind, root = prat[order], pnorm[order], kind[order], root[order]
    row1_of = np.full(bound + 1, -1, dtype=np.int32)
    row2_of = np.full(bound + 1, -1, dtype=np.int32)
    for i in range(len(prat)):
        p = int(prat[i])
        if row1_of[p] < 0:
            row1_of[p] = i
        else:
            row2_of[p] = i
    return PrimeIdealTable(bound=bound, prat=prat, pnorm=pnorm, kind=kind,
                           root=root, kind_of=kind_of,
                           row1_of=row1_of, row2_of=row2_of)
