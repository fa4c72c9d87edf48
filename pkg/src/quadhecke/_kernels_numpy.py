"""Pure-numpy fallback for the hot kernels (no numba).

Selected when numba is unavailable or QUADHECKE_NO_NUMBA is set.  Slower,
same semantics; the test suite asserts element-for-element agreement with
the numba backend.
"""

from __future__ import annotations

import math

import numpy as np

SPLIT, INERT, RAMIFIED, RATIONAL_PRIME = 0, 1, 2, 3


def jacobi64(a: int, n: int) -> int:
    a = int(a) % n
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


def jacobi64_vec(a: np.ndarray, n: np.ndarray) -> np.ndarray:
    """Vectorized Jacobi symbol for odd positive n (elementwise)."""
    a = np.mod(a.astype(np.int64), n)
    n = n.astype(np.int64).copy()
    t = np.ones(a.shape, dtype=np.int64)
    active = a != 0
    while active.any():
        # strip factors of two
        ev = active & (a & 1 == 0)
        while ev.any():
            a[ev] >>= 1
            flip = ev & ((n & 7 == 3) | (n & 7 == 5))
            t[flip] = -t[flip]
            ev = active & (a & 1 == 0)
        # swap and reduce
        a2 = np.where(active, n, a)
        n2 = np.where(active, a, n)
        flip = active & (a2 & 3 == 3) & (n2 & 3 == 3)
        t[flip] = -t[flip]
        a, n = a2, n2
        a[active] = np.mod(a[active], n[active])
        active = active & (a != 0)
    return np.where(n == 1, t, 0)


def symbol_rows(ya, yb, ynorm, prat, kind, root, out):
    p = prat
    arg = np.empty_like(p)
    m = kind == INERT
    arg[m] = np.mod(ynorm, p[m])
    m = kind == RATIONAL_PRIME
    arg[m] = np.mod(ya, p[m])
    m = (kind == SPLIT) | (kind == RAMIFIED)
    arg[m] = np.mod(ya + yb * root[m], p[m])
    out[:] = jacobi64_vec(arg, p).astype(out.dtype)


def _local_coeff(k, s1, s2, e):
    if k < 0:
        return 0
    if k == SPLIT:
        if s1 == 0 and s2 == 0:
            return 0
        if s1 == 0:
            return s2 if e & 1 else 1
        if s2 == 0:
            return s1 if e & 1 else 1
        if s1 == s2:
            return (e + 1) * (s1 if e & 1 else 1)
        return 0 if e & 1 else 1
    if k == INERT:
        if e & 1:
            return 0
        h = e >> 1
        if h == 0:
            return 1
        if s1 == 0:
            return 0
        return s1 if h & 1 else 1
    if s1 == 0:
        return 0
    return s1 if e & 1 else 1


def sieve_coeffs(M, spf, kind_of, s1_of, s2_of, out):
    """Vectorized multiplicative sieve.

    Small primes (p <= sqrt(M)) are folded in with strided slice updates
    reading a snapshot of the pre-p coefficient range; large primes only
    ever appear to the first power and are handled by a short loop over
    the cofactor m.
    """
    out[:] = 0
    if M >= 1:
        out[1] = 1
    idx = np.arange(M + 1)
    ps = idx[(spf[:M + 1] == idx) & (idx >= 2)]
    rt = math.isqrt(M)
    for p in ps[ps <= rt]:
        p = int(p)
        k, s1, s2 = int(kind_of[p]), int(s1_of[p]), int(s2_of[p])
        old = out[1:M // p + 1].copy()
        pe, e = p, 1
        while pe <= M:
            loc = _local_coeff(k, s1, s2, e)
            if loc:
                out[pe::pe] += loc * old[:M // pe]
            pe *= p
            e += 1
    big = ps[ps > rt].astype(np.int64)
    if len(big):
        kb = kind_of[big]
        s1b = s1_of[big].astype(np.int64)
        s2b = s2_of[big].astype(np.int64)
        loc1 = np.where(kb == SPLIT, s1b + s2b,
                        np.where((kb == RAMIFIED) | (kb == RATIONAL_PRIME), s1b, 0))
        out[big] = loc1                       # m = 1
        for m in range(2, M // int(big[0]) + 1):
            if out[m] == 0:
                continue
            sel = big <= M // m
            if not sel.any():
                break
            out[big[sel] * m] += loc1[sel] * out[m]


class _SymbolCache:
    """Per-modulus symbol memo for the fallback Gauss-sum path."""

    def __init__(self, kind_of, root1_of, root2_of, ya, yb, ynorm):
        self.kind_of = kind_of
        self.root1_of = root1_of
        self.root2_of = root2_of
        self.ya, self.yb, self.ynorm = ya, yb, ynorm
        self.memo = {}

    def get(self, p):
        v = self.memo.get(p)
        if v is None:
            k = int(self.kind_of[p])
            if k == SPLIT:
                v = (jacobi64((self.ya + self.yb * int(self.root1_of[p])) % p, p),
                     jacobi64((self.ya + self.yb * int(self.root2_of[p])) % p, p))
            elif k == INERT:
                v = (jacobi64(self.ynorm % p, p), 0)
            else:
                v = (jacobi64((self.ya + self.yb * int(self.root1_of[p])) % p, p), 0)
            self.memo[p] = v
        return v


def gauss_box_core(e_hnf, g_hnf, f_hnf,
                   w1a, w1b, w2a, w2b, tr, nm,
                   qca, qcb, Nq,
                   spf, kind_of, root1_of, root2_of,
                   s1_of, s2_of, stamp_of, stamp,
                   ya, yb, ynorm):
    ii, jj = np.meshgrid(np.arange(e_hnf, dtype=np.int64),
                         np.arange(g_hnf, dtype=np.int64), indexing="ij")
    xa = ii.ravel()
    xb = jj.ravel()

    def _norm(a, b):
        return a * a + tr * a * b + nm * b * b

    d11 = 2 * _norm(np.int64(w1a), np.int64(w1b))
    d22 = 2 * _norm(np.int64(w2a), np.int64(w2b))
    for _ in range(3):
        dx = 2 * xa * w2a + tr * (xa * w2b + xb * w2a) + 2 * nm * xb * w2b
        mu = (2 * dx + d22) // (2 * d22)
        xa = xa - mu * w2a
        xb = xb - mu * w2b
        dx = 2 * xa * w1a + tr * (xa * w1b + xb * w1a) + 2 * nm * xb * w1b
        mu = (2 * dx + d11) // (2 * d11)
        xa = xa - mu * w1a
        xb = xb - mu * w1b
    n = _norm(xa, xb)
    keep = n > 0
    xa, xb, n = xa[keep], xb[keep], n[keep]
    if len(n) and int(n.max()) >= len(spf):
        return 0.0, 0.0, -1, int(n.max())
    max_norm = int(n.max()) if len(n) else 0

    cache = _SymbolCache(kind_of, root1_of, root2_of, ya, yb, ynorm)
    sym = np.ones(len(n), dtype=np.int64)
    nn = n.copy()
    while True:
        alive = (nn > 1) & (sym != 0)
        if not alive.any():
            break
        p = np.where(alive, spf[nn], 2).astype(np.int64)
        e = np.zeros(len(nn), dtype=np.int64)
        div = alive & (nn % p == 0)
        while div.any():
            nn[div] //= p[div]
            e[div] += 1
            div = alive & (nn % p == 0)
        kv = kind_of[p]
        sym[alive & (kv < 0)] = 0
        ups = np.unique(p[alive & (kv >= 0)])
        s1v = np.zeros(len(nn), dtype=np.int64)
        s2v = np.zeros(len(nn), dtype=np.int64)
        r1v = np.zeros(len(nn), dtype=np.int64)
        for up in ups:
            s1, s2 = cache.get(int(up))
            m = alive & (p == up)
            s1v[m], s2v[m], r1v[m] = s1, s2, int(root1_of[up])
        m = alive & (kv == SPLIT)
        if m.any():
            m0 = np.zeros(len(nn), dtype=np.int64)
            ta, tb = xa.copy(), xb.copy()
            go = m & (ta % p == 0) & (tb % p == 0) & (m0 < e)
            while go.any():
                ta[go] //= p[go]
                tb[go] //= p[go]
                m0[go] += 1
                go = m & (ta % p == 0) & (tb % p == 0) & (m0 < e)
            hit = m & (np.mod(ta + tb * r1v, np.where(m, p, 3)) == 0)
            j1 = np.where(hit, e - m0, m0)
            j2 = e - j1
            bad = m & (((s1v == 0) & (j1 > 0)) | ((s2v == 0) & (j2 > 0)))
            sym[bad] = 0
            upd = m & ~bad
            t1 = upd & ((j1 & 1) == 1)
            t2 = upd & ((j2 & 1) == 1)
            sym[t1] *= s1v[t1]
            sym[t2] *= s2v[t2]
        m = alive & (kv == INERT)
        if m.any():
            h = e >> 1
            bad = m & (s1v == 0) & (h > 0)
            sym[bad] = 0
            upd = m & ~bad & ((h & 1) == 1)
            sym[upd] *= s1v[upd]
        m = alive & ((kv == RAMIFIED) | (kv == RATIONAL_PRIME))
        if m.any():
            bad = m & (s1v == 0)
            sym[bad] = 0
            upd = m & ~bad & ((e & 1) == 1)
            sym[upd] *= s1v[upd]
    keep = sym != 0
    xa, xb, sym = xa[keep], xb[keep], sym[keep]
    bc = np.mod(xa * qcb + xb * qca + tr * xb * qcb, Nq)
    ang = 2.0 * np.pi * bc / Nq
    tot = np.sum(sym * np.cos(ang)) + 1j * np.sum(sym * np.sin(ang))
    return float(tot.real), float(tot.imag), int(len(sym)), max_norm


def gauss_box_rational(Nq):
    x = np.arange(1, Nq, 2, dtype=np.int64)
    s = jacobi64_vec(np.full(len(x), Nq, dtype=np.int64) % x, x)
    keep = s != 0
    x, s = x[keep], s[keep]
    ang = 2.0 * np.pi * x / Nq
    tot = np.sum(s * np.cos(ang)) + 1j * np.sum(s * np.sin(ang))
    return float(tot.real), float(tot.imag), int(len(x)), 0
