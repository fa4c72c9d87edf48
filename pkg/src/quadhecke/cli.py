"""Batch entry point.

    python -m quadhecke --field -1 --task first-moment --alpha 0.25 \\
        --X 1024..65536:geometric --out-dir runs/

Tasks: verify-ring, verify-characters, verify-fe, ratios, first-moment,
central-moment, negative-moment, logderiv-moment, density, all.  Region
constraints are validated before anything is computed and violations are
rejected with the offending constraint spelled out.  Each run writes one
JSON document and one CSV (plot-ready); identical config and seed
reproduce byte-identical CSV files unless --timings is given.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass, field as dfield
from typing import Dict, List, Optional, Sequence

import numpy as np

from .density import default_test_function, density_report, smooth_test_function
from .fields import ALL_FIELDS, RATIONAL, field_constants
from .moments import (E_exponent, FamilySweep, MomentReport, ShiftPoint,
                      WeightFunction, central_moment, first_moment,
                      fit_error_exponent, logderiv_moment, negative_moment,
                      ratio_moment)
from .reports import write_csv, write_json

TASKS = ("verify-ring", "verify-characters", "verify-fe", "ratios",
         "first-moment", "central-moment", "negative-moment",
         "logderiv-moment", "density", "all")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    d: int = -1
    task: str = "first-moment"
    X_grid: List[float] = dfield(default_factory=lambda: [2.0 ** k for k in range(10, 17)])
    alpha: complex = 0.25
    beta: complex = 0.1
    r: complex = 0.3
    weight_kind: str = "bump"
    support: tuple = (1.0, 2.0)
    a_radius: float = 0.5
    smooth_pair: bool = False
    include_ramified: bool = True
    workers: int = 1
    seed: int = 1
    out_dir: str = "."
    timings: bool = False
    gauss_bound: int = 100_000
    verify_norm_bound: int = 10_000

    def as_dict(self) -> dict:
        # worker count and output paths do not influence any computed
        # value, so they stay out of the hashed configuration
        return {
            "d": self.d, "task": self.task, "X_grid": self.X_grid,
            "alpha": str(self.alpha), "beta": str(self.beta), "r": str(self.r),
            "weight_kind": self.weight_kind, "support": list(self.support),
            "a_radius": self.a_radius, "smooth_pair": self.smooth_pair,
            "include_ramified": self.include_ramified,
            "seed": self.seed, "gauss_bound": self.gauss_bound,
            "verify_norm_bound": self.verify_norm_bound,
        }


def _parse_complex(txt: str) -> complex:
    return complex(txt.replace(" ", "").replace("i", "j"))


def _parse_grid(txt: str) -> List[float]:
    if ".." in txt:
        head, _, spec = txt.partition(":")
        lo, hi = (float(t) for t in head.split(".."))
        kind = spec or "geometric"
        ratio = 2.0
        if ":" in kind:
            kind, ratio_s = kind.split(":")
            ratio = float(ratio_s)
        if kind != "geometric":
            raise ConfigError(f"unknown grid kind {kind!r}")
        out = []
        x = lo
        while x <= hi * (1 + 1e-12):
            out.append(x)
            x *= ratio
        return out
    return [float(t) for t in txt.split(",") if t]


def _parse_field(txt: str) -> int:
    t = txt.strip().lower()
    if t in ("q", "qq", "rational", "0"):
        return RATIONAL
    d = int(t)
    if d not in ALL_FIELDS:
        raise ConfigError(f"unsupported field selector {txt!r}; known: "
                          f"{sorted(ALL_FIELDS)} or 'q'")
    return d


def parse_config(argv: Optional[Sequence[str]] = None) -> RunConfig:
    ap = argparse.ArgumentParser(prog="quadhecke", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--config", help="key=value file, overridden by flags")
    ap.add_argument("--field", default=None)
    ap.add_argument("--task", choices=TASKS, default=None)
    ap.add_argument("--X", dest="X", default=None,
                    help="grid: 'lo..hi:geometric[:ratio]' or comma list")
    ap.add_argument("--alpha", default=None)
    ap.add_argument("--beta", default=None)
    ap.add_argument("--r", default=None)
    ap.add_argument("--weight", default=None, choices=("bump", "gaussian-window"))
    ap.add_argument("--support", default=None, help="t1,t2")
    ap.add_argument("--a", dest="a_radius", default=None, type=float,
                    help="Fourier support radius of the density test function")
    ap.add_argument("--smooth-pair", action="store_true",
                    help="use the Schwartz test pair instead of the Fejer pair")
    ap.add_argument("--include-ramified", dest="ram", action="store_true", default=None)
    ap.add_argument("--exclude-ramified", dest="ram", action="store_false")
    ap.add_argument("--workers", type=int, default=None)
    ap.add_argument("--seed", type=int, default=None)
    ap.add_argument("--out-dir", default=None)
    ap.add_argument("--timings", action="store_true")
    ap.add_argument("--gauss-bound", type=int, default=None)
    ns = ap.parse_args(argv)

    kv: Dict[str, str] = {}
    if ns.config:
        with open(ns.config, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                k, _, v = line.partition("=")
                kv[k.strip()] = v.strip()

    def pick(flag, key, conv, default):
        if flag is not None:
            return conv(flag)
        if key in kv:
            return conv(kv[key])
        return default

    cfg = RunConfig()
    cfg.d = pick(ns.field, "field", _parse_field, cfg.d)
    cfg.task = pick(ns.task, "task", str, cfg.task)
    cfg.X_grid = pick(ns.X, "X", _parse_grid, cfg.X_grid)
    cfg.alpha = pick(ns.alpha, "alpha", _parse_complex, cfg.alpha)
    cfg.beta = pick(ns.beta, "beta", _parse_complex, cfg.beta)
    cfg.r = pick(ns.r, "r", _parse_complex, cfg.r)
    cfg.weight_kind = pick(ns.weight, "weight", str, cfg.weight_kind)
    sup = pick(ns.support, "support", str, None)
    if sup:
        t1, t2 = (float(t) for t in sup.split(","))
        cfg.support = (t1, t2)
    cfg.a_radius = pick(ns.a_radius, "a", float, cfg.a_radius)
    cfg.smooth_pair = bool(ns.smooth_pair or kv.get("smooth_pair") == "1")
    ram = ns.ram if ns.ram is not None else kv.get("include_ramified")
    if ram is not None:
        cfg.include_ramified = ram in (True, "1", "true", "yes")
    env_workers = os.environ.get("QUADHECKE_WORKERS")
    cfg.workers = pick(ns.workers, "workers", int,
                       int(env_workers) if env_workers else cfg.workers)
    cfg.seed = pick(ns.seed, "seed", int, cfg.seed)
    cfg.out_dir = pick(ns.out_dir, "out_dir", str, cfg.out_dir)
    cfg.timings = bool(ns.timings or kv.get("timings") == "1")
    cfg.gauss_bound = pick(ns.gauss_bound, "gauss_bound", int, cfg.gauss_bound)
    validate_config(cfg)
    return cfg


def validate_config(cfg: RunConfig) -> None:
    if cfg.task not in TASKS:
        raise ConfigError(f"unknown task {cfg.task!r}")
    if not cfg.X_grid:
        raise ConfigError("empty X grid")
    if cfg.d not in ALL_FIELDS:
        raise ConfigError(f"unsupported field {cfg.d}")
    a, b, r = cfg.alpha, cfg.beta, cfg.r
    if cfg.task in ("ratios", "all"):
        E = E_exponent(a, b)
        if E >= 1:
            raise ConfigError(
                f"E(alpha,beta) = {E:.3g} >= 1, the shifted-ratio "
                "asymptotic requires E(alpha,beta) < 1")
        if not (-0.25 < a.real < 0.5):
            raise ConfigError(
                f"Re(alpha) = {a.real} outside (-1/4, 1/2): the shifted-ratio "
                "asymptotic requires -1/4 < Re(alpha) < 1/2")
        if not (0 < b.real < a.real):
            raise ConfigError(
                f"beta = {b}: the shifted-ratio asymptotic requires "
                "0 < Re(beta) < Re(alpha)")
    if cfg.task in ("first-moment",):
        if not (-0.25 < a.real < 0.5) or a == 0:
            raise ConfigError(
                f"alpha = {a}: first moment needs -1/4 < Re(alpha) < 1/2, "
                "alpha != 0 (alpha = 0 is the central-moment task)")
    if cfg.task in ("negative-moment",):
        if b.real <= 0:
            raise ConfigError(f"beta = {b}: negative moment needs Re(beta) > 0")
    if cfg.task in ("logderiv-moment",):
        if not (0 < r.real < 0.5):
            raise ConfigError(
                f"r = {r}: log-derivative moment needs 0 < Re(r) < 1/2")
    if cfg.task in ("density", "all"):
        if cfg.a_radius >= 2.0:
            raise ConfigError(
                f"a = {cfg.a_radius} >= 2: outside the validated support range")
        if cfg.a_radius <= 0:
            raise ConfigError("a must be positive")


# --------------------------------------------------------------------------
# task runners
# --------------------------------------------------------------------------

def _run_verify_ring(cfg: RunConfig, out: List[str]) -> bool:
    from .ring import QuadInt, is_primary, primary_primes_up_to, units
    fld = field_constants(cfg.d)
    ok = True
    if fld.is_rational:
        out.append("verify-ring: rational field, primary = positive odd: pass")
        return True
    bad = tested = 0
    B = int(math.isqrt(cfg.verify_norm_bound)) + 1
    for aa in range(-B, B + 1):
        for bb in range(-B, B + 1):
            x = QuadInt(aa, bb, fld)
            if x.is_zero() or x.norm() > cfg.verify_norm_bound or not x.is_odd():
                continue
            tested += 1
            if sum(1 for u in units(fld) if is_primary(u * x)) != 1:
                bad += 1
    ok &= bad == 0
    out.append(f"primary uniqueness: {tested} odd elements, {bad} failures")
    primes = primary_primes_up_to(fld, 10_000)
    mism = sum(1 for q in primes if q.pi.norm() != q.norm)
    ok &= mism == 0
    out.append(f"prime stream: {len(primes)} primary primes of norm <= 1e4, "
               f"{mism} norm mismatches")
    return ok


def _run_verify_characters(cfg: RunConfig, out: List[str]) -> bool:
    from .characters import gauss_sum, reciprocity_defect
    from .ring import QuadInt, is_primary, mu_K, primary_primes_up_to, units
    fld = field_constants(cfg.d)
    ok = True
    # reciprocity over coprime primary pairs with norms <= 200
    prim = _primary_elements_up_to(fld, 200)
    n_pairs = bad = 0
    for i, n in enumerate(prim):
        for m in prim[i + 1:]:
            if math.gcd(n.norm(), m.norm()) != 1:
                continue
            n_pairs += 1
            if reciprocity_defect(n, m) != 1:
                bad += 1
    ok &= bad == 0
    out.append(f"reciprocity: {n_pairs} coprime primary pairs, {bad} defects")
    # Gauss sums over odd square-free primary c with N(c_K c) <= bound
    worst = 0.0
    count = 0
    bound = cfg.gauss_bound
    cmax = bound // fld.norm_cK
    for c in _primary_elements_up_to(fld, cmax):
        if mu_K(c) == 0:
            continue
        g = gauss_sum(c, fld)
        worst = max(worst, g.abs_defect)
        count += 1
    ok &= worst < 1e-6
    out.append(f"gauss sums: {count} moduli with N(c_K c) <= {bound}, "
               f"worst |g - sqrt(N)| = {worst:.2e}")
    return ok


def _primary_elements_up_to(fld, nmax: int):
    from .ring import QuadInt, is_primary
    out = []
    if fld.is_rational:
        return [QuadInt(n, 0, fld) for n in range(1, nmax + 1, 2)]
    B = int(math.isqrt(nmax)) + 2
    for aa in range(-2 * B, 2 * B + 1):
        for bb in range(-2 * B, 2 * B + 1):
            x = QuadInt(aa, bb, fld)
            if (not x.is_zero() and x.norm() <= nmax and x.is_odd()
                    and is_primary(x)):
                out.append(x)
    out.sort(key=lambda z: (z.norm(), z.a, z.b))
    return out


def _run_verify_fe(cfg: RunConfig, out: List[str]) -> bool:
    from .lfunctions import fe_residual
    from .ring import primary_primes_up_to
    fld = field_constants(cfg.d)
    rng = np.random.default_rng(cfg.seed)
    primes = primary_primes_up_to(fld, 10_000)
    picks = rng.choice(len(primes), size=min(50, len(primes)), replace=False)
    worst = 0.0
    for i in picks:
        s = 0.5 + 1j * rng.uniform(-5.0, 5.0)
        worst = max(worst, fe_residual(s, primes[i], fld))
    out.append(f"functional equation: 50 random primes, worst relative "
               f"residual {worst:.2e}")
    return worst < 1e-8


def run(cfg: RunConfig) -> int:
    """Execute the configured task; write JSON + CSV; print a summary.
    Exit status 0 iff every threshold of the task passed."""
    fld = field_constants(cfg.d)
    w = WeightFunction(cfg.weight_kind, cfg.support)
    lines: List[str] = [f"field d={cfg.d}  task={cfg.task}  backend-seed={cfg.seed}"]
    reports: List[object] = []
    passed = True

    if cfg.task in ("verify-ring",):
        passed &= _run_verify_ring(cfg, lines)
    elif cfg.task == "verify-characters":
        passed &= _run_verify_characters(cfg, lines)
    elif cfg.task == "verify-fe":
        passed &= _run_verify_fe(cfg, lines)
    elif cfg.task in ("ratios", "first-moment", "central-moment",
                      "negative-moment", "logderiv-moment", "density", "all"):
        tasks = ([cfg.task] if cfg.task != "all" else
                 ["ratios", "first-moment", "central-moment",
                  "negative-moment", "logderiv-moment", "density"])
        if cfg.workers > 1 and len(cfg.X_grid) > 1:
            # one worker per grid point; results collected in grid order,
            # so the output is identical for any worker count
            from concurrent.futures import ProcessPoolExecutor
            with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
                futs = [pool.submit(_run_grid_point, cfg, tasks, X)
                        for X in cfg.X_grid]
                for fut in futs:
                    reports.extend(fut.result())
        else:
            for X in cfg.X_grid:
                sweep = FamilySweep(fld, X, w, cfg.include_ramified)
                for t in tasks:
                    reports.append(_run_one(t, X, cfg, w, fld, sweep))
        for t in tasks:
            sel = [r for r in reports if isinstance(r, MomentReport)
                   and r.theorem == _theorem_name(t)]
            if len(sel) >= 4:
                slope, _ = fit_error_exponent([r.X for r in sel],
                                              [max(abs(r.residual), 1e-300)
                                               for r in sel])
                for r in sel:
                    r.fitted_exponent = slope
                lines.append(f"{t}: fitted |residual| exponent = {slope:.3f}")
        for r in reports:
            if isinstance(r, MomentReport):
                lines.append(
                    f"{r.theorem:17s} X={r.X:>9.0f}  lhs={r.lhs.real:+.6e}  "
                    f"main={sum(r.main_terms).real:+.6e}  "
                    f"rel={r.relative_error:.3e}  skips={r.skips}")
                if r.skips:
                    passed = False
            else:
                lines.append(
                    f"density           X={r.X:>9.0f}  D_lhs={r.D_lhs:+.6f}  "
                    f"D_main={r.D_main:+.6f}  D_asym={r.D_asym:+.6f}")

    cfgd = cfg.as_dict()
    os.makedirs(cfg.out_dir, exist_ok=True)
    base = os.path.join(cfg.out_dir, f"quadhecke_{cfg.task}_d{cfg.d}")
    if reports:
        write_csv(base + ".csv", reports, cfgd, timings=cfg.timings)
        write_json(base + ".json", reports, cfgd,
                   summary={"passed": passed, "lines": lines},
                   timings=cfg.timings)
        lines.append(f"wrote {base}.csv and {base}.json")
    print("\n".join(lines))
    print("PASS" if passed else "FAIL")
    return 0 if passed else 1


def _run_grid_point(cfg: RunConfig, tasks, X: float):
    fld = field_constants(cfg.d)
    w = WeightFunction(cfg.weight_kind, cfg.support)
    sweep = FamilySweep(fld, X, w, cfg.include_ramified)
    return [_run_one(t, X, cfg, w, fld, sweep) for t in tasks]


def _theorem_name(task: str) -> str:
    return {"ratios": "ratios", "first-moment": "first-moment",
            "central-moment": "central-moment",
            "negative-moment": "negative-moment",
            "logderiv-moment": "logderiv-moment"}.get(task, task)


def _run_one(task: str, X: float, cfg: RunConfig, w, fld, sweep):
    if task == "ratios":
        return ratio_moment(X, ShiftPoint(cfg.alpha, cfg.beta), w, fld, sweep)
    if task == "first-moment":
        return first_moment(X, cfg.alpha, w, fld, sweep)
    if task == "central-moment":
        return central_moment(X, w, fld, sweep)
    if task == "negative-moment":
        return negative_moment(X, cfg.beta, w, fld, sweep)
    if task == "logderiv-moment":
        return logderiv_moment(X, cfg.r, w, fld, sweep)
    if task == "density":
        h = (smooth_test_function(cfg.a_radius) if cfg.smooth_pair
             else default_test_function(cfg.a_radius))
        return density_report(X, h, w, fld, sweep=sweep,
                              include_ramified=cfg.include_ramified)
    raise ConfigError(f"unknown task {task}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        cfg = parse_config(argv)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
