"""Benchmark the numba kernels against the pure-numpy fallback.

    python -m quadhecke.bench [--scale N]

Times the three hot kernels (character coefficient sieve, prime-symbol
batch, Gauss-sum box walk) through both backends and prints the speedup.
Useful before deciding whether a fallback-only environment can carry the
full acceptance suite or should run the reduced grids.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from . import _kernels_numpy
from .fields import field_constants
from .kernels import _gauss_reduce, _sieve_prep, backend_name
from .ring import QuadInt, ResidueRing, c_K, to_primary
from .tables import prime_ideal_table

try:
    from . import _kernels_numba
except ImportError:          # pragma: no cover
    _kernels_numba = None


def _time(fn, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_sieve(impl, fld, M):
    table, nrow, p1, i1, p2, i2, spf = _sieve_prep(fld, M)
    pi = to_primary(QuadInt(2, 1, fld) if not fld.is_rational else QuadInt(3, 0, fld))
    y = c_K(fld) * pi
    syms = np.zeros(len(table), dtype=np.int8)
    sub = np.zeros(nrow, dtype=np.int8)
    impl.symbol_rows(int(y.a), int(y.b), int(y.norm()),
                     table.prat[:nrow], table.kind[:nrow], table.root[:nrow], sub)
    syms[:nrow] = sub
    s1_of = np.zeros(M + 1, dtype=np.int8)
    s2_of = np.zeros(M + 1, dtype=np.int8)
    s1_of[p1] = syms[i1]
    s2_of[p2] = syms[i2]
    out = np.zeros(M + 1, dtype=np.int64)

    def go():
        impl.sieve_coeffs(M, spf, table.kind_of, s1_of, s2_of, out)
        return out.copy()
    return _time(go)


def bench_symbols(impl, fld, M):
    table = prime_ideal_table(fld, M)
    pi = to_primary(QuadInt(2, 1, fld))
    y = c_K(fld) * pi
    out = np.zeros(len(table), dtype=np.int8)

    def go():
        impl.symbol_rows(int(y.a), int(y.b), int(y.norm()),
                         table.prat, table.kind, table.root, out)
        return out.copy()
    return _time(go)


def bench_gauss(impl, fld, cnorm_target):
    from .kernels import _dense_roots, spf_table as _spf
    pi = to_primary(QuadInt(2, 1, fld))
    # pick a primary square-free c of norm near the target
    from .ring import mu_K, is_primary
    best = None
    B = int(cnorm_target ** 0.5) + 2
    for a in range(-B, B + 1):
        for b in range(-B, B + 1):
            x = QuadInt(a, b, fld)
            if x.is_zero() or not x.is_odd() or x.norm() > cnorm_target:
                continue
            if is_primary(x) and mu_K(x) != 0:
                if best is None or x.norm() > best.norm():
                    best = x
    q = c_K(fld) * best
    ring = ResidueRing(q)
    tr, nm = fld.tr_omega, fld.nm_omega
    w1, w2 = _gauss_reduce((ring.e, 0), (ring.f, ring.g), tr, nm)

    def nf(v):
        return v[0] * v[0] + tr * v[0] * v[1] + nm * v[1] * v[1]
    bound = 2 * (nf(w1) + nf(w2)) + 16
    table, r1, r2 = _dense_roots(fld, bound)
    spf = _spf(bound)
    qc = q.conj()
    s1 = np.zeros(len(r1), dtype=np.int8)
    s2 = np.zeros(len(r1), dtype=np.int8)
    stamp_of = np.zeros(len(r1), dtype=np.int64)
    stamp = [0]

    def go():
        stamp[0] += 1
        return impl.gauss_box_core(
            ring.e, ring.g, ring.f, w1[0], w1[1], w2[0], w2[1], tr, nm,
            qc.a, qc.b, ring.size, spf, table.kind_of, r1, r2,
            s1, s2, stamp_of, stamp[0], q.a, q.b, q.norm())
    return _time(go)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--scale", type=int, default=30_000,
                    help="sieve bound (default 30000)")
    ap.add_argument("--gauss-norm", type=int, default=1200,
                    help="target norm of the Gauss-sum modulus factor")
    ns = ap.parse_args(argv)
    fld = field_constants(-1)
    print(f"active backend: {backend_name()}")
    rows = []
    impls = [("numpy", _kernels_numpy)]
    if _kernels_numba is not None:
        # warm the JIT outside the timing
        bench_sieve(_kernels_numba, fld, 1024)
        bench_symbols(_kernels_numba, fld, 1024)
        bench_gauss(_kernels_numba, fld, 64)
        impls.append(("numba", _kernels_numba))
    results = {}
    for name, impl in impls:
        t1, o1 = bench_sieve(impl, fld, ns.scale)
        t2, o2 = bench_symbols(impl, fld, ns.scale)
        t3, o3 = bench_gauss(impl, fld, ns.gauss_norm)
        results[name] = (t1, t2, t3, o1, o2, o3)
        rows.append((name, t1, t2, t3))
    print(f"{'backend':8s} {'sieve':>12s} {'symbols':>12s} {'gauss box':>12s}")
    for name, t1, t2, t3 in rows:
        print(f"{name:8s} {t1 * 1e3:9.2f} ms {t2 * 1e3:9.2f} ms {t3 * 1e3:9.2f} ms")
    if len(rows) == 2:
        a, b = results["numpy"], results["numba"]
        assert np.array_equal(a[3], b[3]), "sieve outputs differ across backends"
        assert np.array_equal(a[4], b[4]), "symbol outputs differ across backends"
        ga = complex(a[5][0], a[5][1])
        gb = complex(b[5][0], b[5][1])
        assert abs(ga - gb) < 1e-9, "gauss sums differ across backends"
        print(f"{'speedup':8s} {a[0] / b[0]:11.1f}x {a[1] / b[1]:11.1f}x "
              f"{a[2] / b[2]:11.1f}x   (outputs identical)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
