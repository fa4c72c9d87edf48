"""Machine-readable run outputs: one JSON document per run plus CSV rows
for plotting.  Every row embeds the configuration hash; identical config
and seed reproduce identical files (timing columns are zeroed unless
timings are explicitly requested, because wall-clock values cannot be
byte-stable)."""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import asdict, is_dataclass
from typing import Iterable, List, Optional

from .density import DensityReport
from .moments import MomentReport

SCHEMA_VERSION = "1"

MOMENT_COLUMNS = [
    "schema", "config", "theorem", "d", "X",
    "alpha_re", "alpha_im", "beta_re", "beta_im",
    "lhs_re", "lhs_im", "main1_re", "main1_im", "main2_re", "main2_im",
    "residual_abs", "rel_err", "fitted_exponent", "skips", "est_error",
    "n_terms", "seconds",
]

DENSITY_COLUMNS = [
    "schema", "config", "theorem", "d", "X", "a",
    "D_lhs", "D_main", "D_asym", "F_K",
    "lhs_main_abs", "main_asym_abs", "est_error", "n_primes", "seconds",
]


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def moment_row(rep: MomentReport, chash: str, timings: bool) -> List[str]:
    m1 = rep.main_terms[0] if rep.main_terms else 0.0
    m2 = rep.main_terms[1] if len(rep.main_terms) > 1 else 0.0
    row = [SCHEMA_VERSION, chash, rep.theorem, rep.d, rep.X,
           rep.alpha.real, rep.alpha.imag, rep.beta.real, rep.beta.imag,
           rep.lhs.real, rep.lhs.imag, complex(m1).real, complex(m1).imag,
           complex(m2).real, complex(m2).imag,
           abs(rep.residual), rep.relative_error,
           "" if rep.fitted_exponent is None else rep.fitted_exponent,
           rep.skips, rep.est_error, rep.n_terms,
           rep.seconds if timings else 0.0]
    return [_fmt(v) for v in row]


def density_row(rep: DensityReport, chash: str, timings: bool) -> List[str]:
    row = [SCHEMA_VERSION, chash, "density", rep.d, rep.X, rep.a,
           rep.D_lhs, rep.D_main, rep.D_asym, rep.F_K,
           abs(rep.D_lhs - rep.D_main), abs(rep.D_main - rep.D_asym),
           rep.est_error, rep.n_primes, rep.seconds if timings else 0.0]
    return [_fmt(v) for v in row]


def write_csv(path, reports: Iterable, config: dict, timings: bool = False) -> None:
    """One CSV per report family; a mixed run puts the density rows in a
    sibling file so each file keeps a single header."""
    chash = config_hash(config)
    reports = list(reports)
    density = [r for r in reports if isinstance(r, DensityReport)]
    moments = [r for r in reports if isinstance(r, MomentReport)]
    main = moments or density
    with open(path, "w", newline="", encoding="utf-8") as fh:
        wr = csv.writer(fh, quoting=csv.QUOTE_MINIMAL, lineterminator="\r\n")
        if moments:
            wr.writerow(MOMENT_COLUMNS)
            for r in moments:
                wr.writerow(moment_row(r, chash, timings))
        elif density:
            wr.writerow(DENSITY_COLUMNS)
            for r in density:
                wr.writerow(density_row(r, chash, timings))
    if moments and density:
        side = str(path)
        side = side[:-4] + ".density.csv" if side.endswith(".csv") else side + ".density.csv"
        with open(side, "w", newline="", encoding="utf-8") as fh:
            wr = csv.writer(fh, quoting=csv.QUOTE_MINIMAL, lineterminator="\r\n")
            wr.writerow(DENSITY_COLUMNS)
            for r in density:
                wr.writerow(density_row(r, chash, timings))


def _jsonable(obj):
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if is_dataclass(obj):
        return {k: _jsonable(v) for k, v in asdict(obj).items()}
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def write_json(path, reports: Iterable, config: dict,
               summary: Optional[dict] = None, timings: bool = True) -> None:
    doc = {
        "schema": SCHEMA_VERSION,
        "config": config,
        "config_hash": config_hash(config),
        "summary": _jsonable(summary or {}),
        "reports": [_jsonable(r) for r in reports],
    }
    if not timings:
        for r in doc["reports"]:
            r["seconds"] = 0.0
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)
        fh.write("\n")
