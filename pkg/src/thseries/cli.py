"""Command-line front end: compute and cache series coefficients, run
verification suites, and emit positivity reports.

Exit codes: 0 pass, 1 verification failure, 2 data gap, 3 convergence failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_DATA_GAP = 2
EXIT_UNCONVERGED = 3

CACHE_ENV = "THSERIES_CACHE"
CACHE_VERSION = "thseries-cache-v1"


@dataclass
class RunConfig:
    """Knobs shared by all commands."""

    c_max: int = 10_000
    precision: int = 128
    n_max: int = 100
    threshold: float = 0.1
    jobs: int = 1
    fmt: str = "json"

    def __post_init__(self):
        if min(self.c_max, self.precision, self.n_max, self.jobs) < 1:
            raise ValueError("all sizes must be positive")
        if not 0 < self.threshold < 0.5:
            raise ValueError("threshold must lie in (0, 0.5)")
        if self.fmt not in ("json", "csv"):
            raise ValueError("format must be json or csv")

    def fingerprint(self) -> dict:
        return {"c_max": self.c_max, "precision": self.precision,
                "n_max": self.n_max, "threshold": self.threshold}


class CoeffCache:
    """Line-oriented coefficient store: label, exponent, coefficient, provenance."""

    def __init__(self):
        self.series = {}      # label -> {exponent: (int, provenance)}

    def add(self, label: str, exponent: int, value: int, provenance: str):
        self.series.setdefault(label, {})[exponent] = (int(value), provenance)

    def coefficients(self, label: str) -> dict:
        return {e: v for e, (v, _) in self.series.get(label, {}).items()}

    def exponents(self, label: str):
        return sorted(self.series.get(label, ()))

    def validate(self):
        for label, entries in self.series.items():
            if not entries:
                raise ValueError(f"empty series {label}")
            first = min(entries)
            if first != -3 or entries[first][0] != 2:
                raise ValueError(f"series {label} must start with (-3, 2)")

    def write(self, path: str):
        with open(path, "w") as fh:
            fh.write(f"# {CACHE_VERSION}\n")
            for label in sorted(self.series):
                for e in sorted(self.series[label]):
                    v, prov = self.series[label][e]
                    fh.write(f"{label} {e} {v} {prov}\n")

    @staticmethod
    def read(path: str) -> "CoeffCache":
        cache = CoeffCache()
        with open(path) as fh:
            header = fh.readline().strip()
            if header != f"# {CACHE_VERSION}":
                raise ValueError(f"unrecognized cache header: {header}")
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                label, e, v, prov = line.split(maxsplit=3)
                cache.add(label, int(e), int(v), prov)
        cache.validate()
        return cache

    @staticmethod
    def reference() -> "CoeffCache":
        """The shipped reference cache."""
        with resources.as_file(resources.files("thseries.data")
                               .joinpath("reference_cache.txt")) as p:
            return CoeffCache.read(str(p))


def default_cache_path() -> str | None:
    return os.environ.get(CACHE_ENV)


def _load_cache(path: str | None) -> CoeffCache:
    if path:
        return CoeffCache.read(path)
    env = default_cache_path()
    if env and os.path.exists(env):
        return CoeffCache.read(env)
    return CoeffCache.reference()


def _common_columns(cache: CoeffCache, labels) -> list:
    common = None
    for lbl in labels:
        have = set(cache.exponents(lbl))
        common = have if common is None else common & have
    return sorted(common or ())


def cmd_compute(classes, cfg: RunConfig, cache_path: str | None = None) -> tuple:
    """Compute series coefficients by truncated summation; returns
    (exit code, report, cache)."""
    from .rademacher import (TruncationConfig, UnconvergedError, class_record,
                             series_F)
    cache = CoeffCache()
    tc = TruncationConfig(c_max=cfg.c_max, precision=cfg.precision)
    unconverged = []
    for label in classes:
        rec = class_record(label)
        estimates = {}
        try:
            f = series_F(rec, cfg.n_max, tc,
                         threshold=Fraction(cfg.threshold).limit_denominator(10**6),
                         estimates=estimates)
        except UnconvergedError as err:
            unconverged.append({"label": rec.label,
                                "offenders": [(n, float(d)) for n, d in err.offenders]})
            continue
        prov = f"truncated({cfg.c_max},{cfg.precision})"
        for e in f.support():
            cache.add(rec.label, int(e), int(f.coefficient(e)), prov)
    report = {"config": cfg.fingerprint(), "classes": list(classes),
              "unconverged": unconverged}
    if cache_path and cache.series:
        cache.write(cache_path)
        report["cache_path"] = cache_path
    code = EXIT_UNCONVERGED if unconverged else EXIT_PASS
    return code, report, cache


def _pipeline_matrix(cache: CoeffCache):
    from .pipeline import SERIES_LABELS, CoeffMatrix
    missing = [lbl for lbl in SERIES_LABELS if lbl not in cache.series]
    if missing:
        return None, missing
    coeffs = {lbl: cache.coefficients(lbl) for lbl in SERIES_LABELS}
    return CoeffMatrix.from_coefficients(coeffs), []


def cmd_verify(suite: str, cfg: RunConfig, cache_path: str | None = None) -> tuple:
    """Run one verification suite; returns (exit code, report)."""
    report = {"suite": suite, "config": cfg.fingerprint()}
    if suite == "orthogonality":
        from .chartable import schur_check
        res = schur_check()
        report["schur"] = {"pairs_checked": res["pairs_checked"],
                          "failures": len(res["failures"])}
        return (EXIT_PASS if res["passed"] else EXIT_FAIL), report

    cache = _load_cache(cache_path)
    if suite in ("relations", "congruences", "pipeline"):
        cm, missing = _pipeline_matrix(cache)
        if cm is None:
            report["missing_series"] = missing
            return EXIT_DATA_GAP, report
        if suite == "relations":
            from .pipeline import verify_linear_relations
            res = verify_linear_relations(cm)
        elif suite == "congruences":
            from .pipeline import verify_congruences
            res = verify_congruences(cm)
        else:
            from .pipeline import build_reduction, integrality_certificate
            mats = build_reduction(cm)
            res = {"primes": {}, "passed": True,
                   "retained": mats.retained_labels,
                   "deleted": mats.deleted_labels}
            for p in (2, 3, 5, 7, 13, 19, 31):
                cert = integrality_certificate(p, cm, mats)
                res["primes"][p] = {"passed": cert["passed"],
                                    "rank_mod_p": cert["rank_mod_p"],
                                    "violations": cert["violations"][:5]}
                res["passed"] = res["passed"] and cert["passed"]
        report["result"] = res
        return (EXIT_PASS if res["passed"] else EXIT_FAIL), report

    if suite == "replicability":
        from .qseries import QSeries
        from .replicability import load_identities, verify_identity
        results = []
        gaps = []
        passed = True
        for ident in load_identities():
            coeffs = cache.coefficients(ident.label)
            if not coeffs:
                gaps.append(ident.label)
                continue
            n_max = max(coeffs)
            order = min(cfg.n_max, (n_max - 3) // 4)
            f = QSeries({e: Fraction(v) for e, v in coeffs.items()}, 1, n_max + 1)
            res = verify_identity(ident, f, order)
            results.append(res)
            passed = passed and res["passed"]
        report["identities"] = results
        if gaps:
            report["data_gaps"] = sorted(set(gaps))
            return EXIT_DATA_GAP, report
        return (EXIT_PASS if passed else EXIT_FAIL), report

    raise ValueError(f"unknown suite {suite!r}")


def cmd_positivity(cfg: RunConfig, cache_path: str | None = None,
                   characters=range(1, 49), scan_max: int = 10_000) -> tuple:
    """Thresholds from the closed-form bounds plus exact cached-range checks."""
    from .pipeline import SERIES_LABELS
    from .positivity import exact_positivity_check, positivity_threshold
    from .rademacher import class_record
    cache = _load_cache(cache_path)
    cm, missing = _pipeline_matrix(cache)
    report = {"config": cfg.fingerprint(), "reference_threshold": 375}
    if cm is None:
        report["missing_series"] = missing
        return EXIT_DATA_GAP, report
    thresholds = {}
    for j in characters:
        thresholds[j] = positivity_threshold(j, cfg.precision, scan_max)
    report["thresholds"] = thresholds
    report["threshold_max"] = max(thresholds.values())
    columns = {}
    for e in cm.exponents:
        if e >= 0:
            col = cm.column(e)
            columns[e] = {lbl: col[class_record(lbl).label]
                          for lbl in cm.expanded_labels if lbl in
                          _class_label_set()}
    res = exact_positivity_check(columns)
    report["exact"] = {"columns": res["columns"],
                       "failures": res["failures"][:10]}
    ok = res["passed"] and max(thresholds.values()) <= scan_max
    return (EXIT_PASS if ok else EXIT_FAIL), report


def _class_label_set():
    from .chartable import CharacterTable
    return set(CharacterTable.load().classes)


def _emit(report: dict, fmt: str):
    if fmt == "json":
        print(json.dumps(report, indent=2, default=str))
    else:
        buf = io.StringIO()
        w = csv.writer(buf)
        for k, v in report.items():
            w.writerow([k, json.dumps(v, default=str)])
        print(buf.getvalue(), end="")


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="thseries",
                                 description="McKay-Thompson series toolkit")
    ap.add_argument("--c-max", type=int, default=10_000)
    ap.add_argument("--precision", type=int, default=128)
    ap.add_argument("--n-max", type=int, default=100)
    ap.add_argument("--threshold", type=float, default=0.1)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--format", choices=("json", "csv"), default="json")
    ap.add_argument("--cache", metavar="PATH", default=None)
    sub = ap.add_subparsers(dest="command", required=True)

    p_compute = sub.add_parser("compute", help="compute series coefficients")
    p_compute.add_argument("--classes", nargs="+", required=True)

    p_verify = sub.add_parser("verify", help="run a verification suite")
    p_verify.add_argument("suite", choices=("relations", "congruences",
                                            "pipeline", "replicability",
                                            "orthogonality"))

    sub.add_parser("positivity", help="positivity thresholds and exact checks")

    args = ap.parse_args(argv)
    cfg = RunConfig(c_max=args.c_max, precision=args.precision,
                    n_max=args.n_max, threshold=args.threshold,
                    jobs=args.jobs, fmt=args.format)
    if args.command == "compute":
        code, report, _ = cmd_compute(args.classes, cfg, args.cache)
    elif args.command == "verify":
        code, report = cmd_verify(args.suite, cfg, args.cache)
    else:
        code, report = cmd_positivity(cfg, args.cache)
    report["exit_code"] = code
    _emit(report, cfg.fmt)
    return code


if __name__ == "__main__":
    sys.exit(main())
