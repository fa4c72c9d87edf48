"""Numba implementations of the hot integer kernels.

Everything here works on int64 coordinates; callers guarantee the inputs
fit (desk-scale norms stay far below 2^63).  The numpy twin in
``_kernels_numpy`` implements identical semantics and the test suite
checks the two backends element for element.
"""

from __future__ import annotations

import numpy as np
from numba import njit

SPLIT, INERT, RAMIFIED, RATIONAL_PRIME = 0, 1, 2, 3


@njit("int64(int64, int64)", cache=True)
def jacobi64(a, n):
    a = a % n
    if a < 0:
        a += n
    t = 1
    while a != 0:
        while a & 1 == 0:
            a >>= 1
            r = n & 7
            if r == 3 or r == 5:
                t = -t
        tmp = a
        a = n
        n = tmp
        if (a & 3) == 3 and (n & 3) == 3:
            t = -t
        a = a % n
    if n == 1:
        return t
    return 0


@njit(cache=True)
def symbol_rows(ya, yb, ynorm, prat, kind, root, out):
    """Value of the symbol (y / ideal) for every table row."""
    for i in range(prat.shape[0]):
        p = prat[i]
        k = kind[i]
        if k == INERT:
            out[i] = jacobi64(ynorm % p, p)
        elif k == RATIONAL_PRIME:
            out[i] = jacobi64(ya % p, p)
        else:
            out[i] = jacobi64((ya + yb * root[i]) % p, p)


@njit("int64(int8, int8, int8, int64)", cache=True, inline="always")
def _local_coeff(k, s1, s2, e):
    # coefficient of the local Euler factor at p^e
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


@njit(cache=True)
def sieve_coeffs(M, spf, kind_of, s1_of, s2_of, out):
    """Dirichlet coefficients a(nu) = sum over ideals of norm nu of chi,
    by a smallest-prime-factor walk (fully multiplicative over rational
    primes through the local factors)."""
    out[0] = 0
    if M >= 1:
        out[1] = 1
    for nn in range(2, M + 1):
        p = spf[nn]
        m = nn
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        base = out[m]
        if base == 0:
            out[nn] = 0
        else:
            out[nn] = base * _local_coeff(kind_of[p], s1_of[p], s2_of[p], e)


@njit(cache=True)
def gauss_box_core(e_hnf, g_hnf, f_hnf,
                   w1a, w1b, w2a, w2b, tr, nm,
                   qca, qcb, Nq,
                   spf, kind_of, root1_of, root2_of,
                   s1_of, s2_of, stamp_of, stamp,
                   ya, yb, ynorm):
    """Brute-force Gauss sum over the HNF box of the ideal lattice.

    Per representative: Babai-reduce against the Gauss-reduced basis
    (w1, w2), factor the norm by the SPF table, turn valuations into
    symbol contributions (split primes via content + root test, no
    element division needed), and accumulate chi(x) e(b/N) where b is
    the omega-coordinate of x*conj(q).

    Returns (re, im, n_terms, max_norm_seen).
    """
    d11 = 2 * (w1a * w1a + tr * w1a * w1b + nm * w1b * w1b)
    d22 = 2 * (w2a * w2a + tr * w2a * w2b + nm * w2b * w2b)
    tot_re = 0.0
    tot_im = 0.0
    cnt = 0
    max_norm = 0
    two_pi = 2.0 * np.pi
    for i in range(e_hnf):
        for j in range(g_hnf):
            xa = i
            xb = j
            # three alternating nearest-plane passes
            for _ in range(3):
                dx2 = 2 * xa * w2a + tr * (xa * w2b + xb * w2a) + 2 * nm * xb * w2b
                mu = (2 * dx2 + d22) // (2 * d22)
                xa -= mu * w2a
                xb -= mu * w2b
                dx1 = 2 * xa * w1a + tr * (xa * w1b + xb * w1a) + 2 * nm * xb * w1b
                mu = (2 * dx1 + d11) // (2 * d11)
                xa -= mu * w1a
                xb -= mu * w1b
            n = xa * xa + tr * xa * xb + nm * xb * xb
            if n == 0:
                continue
            if n > max_norm:
                max_norm = n
            if n >= spf.shape[0]:
                return 0.0, 0.0, -1, n        # SPF table too small: caller retries
            sym = 1
            nn = n
            while nn > 1 and sym != 0:
                p = np.int64(spf[nn])
                e = 0
                while nn % p == 0:
                    nn //= p
                    e += 1
                k = kind_of[p]
                if k < 0:
                    sym = 0
                    break
                if stamp_of[p] != stamp:
                    stamp_of[p] = stamp
                    if k == SPLIT:
                        s1_of[p] = jacobi64((ya + yb * root1_of[p]) % p, p)
                        s2_of[p] = jacobi64((ya + yb * root2_of[p]) % p, p)
                    elif k == INERT:
                        s1_of[p] = jacobi64(ynorm % p, p)
                        s2_of[p] = 0
                    else:
                        s1_of[p] = jacobi64((ya + yb * root1_of[p]) % p, p)
                        s2_of[p] = 0
                if k == SPLIT:
                    s1 = s1_of[p]
                    s2 = s2_of[p]
                    # content valuation m0 = v_p(x), then a single root test
                    m0 = 0
                    ta, tb = xa, xb
                    while ta % p == 0 and tb % p == 0 and m0 < e:
                        ta //= p
                        tb //= p
                        m0 += 1
                    hit = (ta + tb * root1_of[p]) % p == 0
                    if hit:
                        j1 = m0 + (e - 2 * m0)
                    else:
                        j1 = m0
                    j2 = e - j1
                    if (s1 == 0 and j1 > 0) or (s2 == 0 and j2 > 0):
                        sym = 0
                        break
                    if j1 & 1:
                        sym *= s1
                    if j2 & 1:
                        sym *= s2
                elif k == INERT:
                    s = s1_of[p]
                    h = e >> 1
                    if s == 0 and h > 0:
                        sym = 0
                        break
                    if h & 1:
                        sym *= s
                else:
                    s = s1_of[p]
                    if s == 0:
                        sym = 0
                        break
                    if e & 1:
                        sym *= s
            if sym == 0:
                continue
            bc = (xa * qcb + xb * qca + tr * xb * qcb) % Nq
            if bc < 0:
                bc += Nq
            ang = two_pi * bc / Nq
            tot_re += sym * np.cos(ang)
            tot_im += sym * np.sin(ang)
            cnt += 1
    return tot_re, tot_im, cnt, max_norm


@njit(cache=True)
def gauss_box_rational(Nq):
    """The rational-field Gauss sum: sum over x mod 8c of (8c/x) e(x/8c)."""
    tot_re = 0.0
    tot_im = 0.0
    cnt = 0
    two_pi = 2.0 * np.pi
    for x in range(1, Nq, 2):
        s = jacobi64(Nq % x, x)
        if s == 0:
            continue
        ang = two_pi * x / Nq
        tot_re += s * np.cos(ang)
        tot_im += s * np.sin(ang)
        cnt += 1
    return tot_re, tot_im, cnt, 0
