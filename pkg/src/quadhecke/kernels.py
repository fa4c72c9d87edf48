"""Dispatch layer for the hot kernels: numba when available, pure numpy
otherwise (set QUADHECKE_NO_NUMBA=1 to force the fallback).

High-level entry points do the integer prep (HNF, Gauss-reduced bases,
tables, scatter maps) in plain Python and hand tight loops to the active
backend.  ``python -m quadhecke.bench`` times the two backends against
each other.
"""

from __future__ import annotations

import os
from threading import Lock
from typing import Dict, Tuple

import numpy as np

from . import _kernels_numpy as _numpy_impl
from .fields import FieldParams
from .ring import QuadInt, ResidueRing
from .tables import prime_ideal_table, spf_table

_NO_NUMBA = os.environ.get("QUADHECKE_NO_NUMBA", "") not in ("", "0")

if not _NO_NUMBA:
    try:
        from . import _kernels_numba as _impl
        HAS_NUMBA = True
    except ImportError:                        # pragma: no cover
        _impl = _numpy_impl
        HAS_NUMBA = False
else:
    _impl = _numpy_impl
    HAS_NUMBA = False


def backend_name() -> str:
    return "numba" if HAS_NUMBA else "numpy"


_lock = Lock()
_dense_roots_cache: Dict[Tuple[int, int], Tuple[np.ndarray, np.ndarray]] = {}
_gauss_buffers: Dict[Tuple[int, int], dict] = {}


def _dense_roots(fld: FieldParams, bound: int):
    table = prime_ideal_table(fld, bound)
    key = (fld.d, table.bound)
    with _lock:
        hit = _dense_roots_cache.get(key)
    if hit is not None:
        return table, hit[0], hit[1]
    r1 = np.zeros(table.bound + 1, dtype=np.int64)
    r2 = np.zeros(table.bound + 1, dtype=np.int64)
    ps = np.nonzero(table.kind_of >= 0)[0]
    i1 = table.row1_of[ps]
    ok1 = i1 >= 0
    r1[ps[ok1]] = table.root[i1[ok1]]
    i2 = table.row2_of[ps]
    ok2 = i2 >= 0
    r2[ps[ok2]] = table.root[i2[ok2]]
    with _lock:
        _dense_roots_cache[key] = (r1, r2)
    return table, r1, r2


def symbol_values(fld: FieldParams, y: QuadInt, M: int) -> np.ndarray:
    """chi-top symbol (y/ideal) on every prime-ideal table row of norm <= M;
    rows beyond M get 0."""
    table = prime_ideal_table(fld, M)
    out = np.zeros(len(table), dtype=np.int8)
    sel = table.pnorm <= M
    if sel.any():
        sub = np.zeros(int(sel.sum()), dtype=np.int8)
        _impl.symbol_rows(int(y.a), int(y.b), int(y.norm()),
                          table.prat[sel], table.kind[sel], table.root[sel], sub)
        out[sel] = sub
    return out


_sieve_prep_cache: Dict[Tuple[int, int], tuple] = {}


def _sieve_prep(fld: FieldParams, M: int):
    """y-independent scatter maps for the coefficient sieve at bound M."""
    table = prime_ideal_table(fld, M)
    key = (fld.d, table.bound, M)
    with _lock:
        prep = _sieve_prep_cache.get(key)
    if prep is not None:
        return prep
    nrow = int(np.count_nonzero(table.pnorm <= M))
    ps = np.nonzero(table.kind_of[:M + 1] >= 0)[0]
    i1 = table.row1_of[ps]
    ok1 = i1 >= 0
    p1, i1 = ps[ok1], i1[ok1]
    i2 = table.row2_of[ps]
    ok2 = i2 >= 0
    p2, i2 = ps[ok2], i2[ok2]
    prep = (table, nrow, p1, i1, p2, i2, spf_table(M))
    with _lock:
        _sieve_prep_cache[key] = prep
    return prep


def chi_coefficients(fld: FieldParams, y: QuadInt, M: int) -> np.ndarray:
    """Dirichlet coefficients a(nu) = sum_{N(n)=nu} chi^(y)(n), nu <= M,
    for the quadratic character with numerator y."""
    table, nrow, p1, i1, p2, i2, spf = _sieve_prep(fld, M)
    syms = np.zeros(len(table), dtype=np.int8)
    if nrow:
        sub = np.zeros(nrow, dtype=np.int8)
        _impl.symbol_rows(int(y.a), int(y.b), int(y.norm()),
                          table.prat[:nrow], table.kind[:nrow],
                          table.root[:nrow], sub)
        syms[:nrow] = sub
    s1_of = np.zeros(M + 1, dtype=np.int8)
    s2_of = np.zeros(M + 1, dtype=np.int8)
    s1_of[p1] = syms[i1]
    s2_of[p2] = syms[i2]
    out = np.zeros(M + 1, dtype=np.int64)
    _impl.sieve_coeffs(M, spf, table.kind_of, s1_of, s2_of, out)
    return out


def _gauss_reduce(v1, v2, tr, nm):
    def nf(v):
        return v[0] * v[0] + tr * v[0] * v[1] + nm * v[1] * v[1]

    def dot2(u, v):
        return 2 * u[0] * v[0] + tr * (u[0] * v[1] + u[1] * v[0]) + 2 * nm * u[1] * v[1]

    if nf(v1) > nf(v2):
        v1, v2 = v2, v1
    while True:
        n1 = dot2(v1, v1)
        mu = (2 * dot2(v1, v2) + n1) // (2 * n1)
        v2 = (v2[0] - mu * v1[0], v2[1] - mu * v1[1])
        if nf(v2) >= nf(v1):
            return v1, v2
        v1, v2 = v2, v1


def gauss_sum_box(fld: FieldParams, q: QuadInt) -> Tuple[complex, int]:
    """Brute-force Gauss sum over a full residue system mod (q)."""
    ring = ResidueRing(q)
    nq = ring.size
    if fld.is_rational:
        re, im, cnt, _ = _impl.gauss_box_rational(nq)
        return complex(re, im), cnt
    tr, nm = fld.tr_omega, fld.nm_omega
    w1, w2 = _gauss_reduce((ring.e, 0), (ring.f, ring.g), tr, nm)

    def nf(v):
        return v[0] * v[0] + tr * v[0] * v[1] + nm * v[1] * v[1]

    bound = 2 * (nf(w1) + nf(w2)) + 16
    qc = q.conj()
    while True:
        table, r1, r2 = _dense_roots(fld, bound)
        spf = spf_table(bound)
        key = (fld.d, len(r1))
        with _lock:
            bufs = _gauss_buffers.get(key)
            if bufs is None:
                bufs = {"s1": np.zeros(len(r1), dtype=np.int8),
                        "s2": np.zeros(len(r1), dtype=np.int8),
                        "stamp_of": np.zeros(len(r1), dtype=np.int64),
                        "stamp": 0}
                _gauss_buffers[key] = bufs
            bufs["stamp"] += 1
            stamp = bufs["stamp"]
        re, im, cnt, max_norm = _impl.gauss_box_core(
            ring.e, ring.g, ring.f,
            w1[0], w1[1], w2[0], w2[1], tr, nm,
            qc.a, qc.b, nq,
            spf, table.kind_of, r1, r2,
            bufs["s1"], bufs["s2"], bufs["stamp_of"], stamp,
            q.a, q.b, q.norm())
        if cnt >= 0:
            assert cnt <= nq
            return complex(re, im), cnt
        bound = 2 * max_norm + 16       # SPF table was too small; retry


def jacobi_batch(a: np.ndarray, n: np.ndarray) -> np.ndarray:
    """Elementwise Jacobi symbols (test/bench helper)."""
    if HAS_NUMBA:
        out = np.empty(len(a), dtype=np.int64)
        for i in range(len(a)):
            out[i] = _impl.jacobi64(int(a[i]), int(n[i]))
        return out
    return _numpy_impl.jacobi64_vec(np.asarray(a, dtype=np.int64),
                                    np.asarray(n, dtype=np.int64))
