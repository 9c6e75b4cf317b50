"""Command line front end.

Exit codes: 0 success, 1 identity counterexample, 2 construction failure,
3 usage error. Configurations are cached as JSON under $QUATLAT_CACHE
(default ~/.cache/quatlat), keyed by (N, N1) and a schema version.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from . import __version__
from .binary import is_discriminant, is_fundamental
from .identities import (
    Configuration,
    VerificationReport,
    admissibility_exceptions,
    build_configuration,
    check_certificates,
    configuration_from_json,
    configuration_to_json,
    decompositions,
    genus_mass,
    genus_omax,
    theorem_reports,
)
from .lattice import GramLattice, count_binary, count_unary
from .orders import ConstructionError
from .quaternion import AlgebraSearchError

SCHEMA_VERSION = 1
CACHE_ENV = "QUATLAT_CACHE"

EXIT_OK, EXIT_COUNTEREXAMPLE, EXIT_CONSTRUCTION, EXIT_USAGE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# --- cache -------------------------------------------------------------------------

def cache_dir() -> Path:
    return Path(os.environ.get(CACHE_ENV) or Path.home() / ".cache" / "quatlat")


def _cache_path(N: int, N1: int) -> Path:
    return cache_dir() / f"config-N{N}-N1_{N1}.json"


def load_configuration(N: int, N1: int, use_cache: bool = True) -> Configuration:
    """Cached configuration; rebuilt (and certificates rerun) on a miss or schema change."""
    path = _cache_path(N, N1)
    if use_cache and path.exists():
        try:
            doc = json.loads(path.read_text())
            if doc.get("schema") == SCHEMA_VERSION:
                return configuration_from_json(doc["configuration"])
        except (ValueError, KeyError):
            pass  # unreadable cache entries are rebuilt
    cfg = build_configuration(N, N1)
    fails = check_certificates(cfg)
    if fails:
        raise ConstructionError("; ".join(fails))
    if use_cache:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(f".tmp{os.getpid()}")
        tmp.write_text(json.dumps({"schema": SCHEMA_VERSION, "configuration": configuration_to_json(cfg)}))
        tmp.replace(path)
    return cfg


# --- argument helpers ----------------------------------------------------------------

def _splits(N: int, N1: int | None) -> list[int]:
    try:
        options = decompositions(N)
    except ValueError as e:
        raise UsageError(str(e)) from None
    if N < 2:
        raise UsageError("N must be at least 2")
    if N1 is None:
        return options
    if N1 not in options:
        raise UsageError(f"N1 = {N1} is not a divisor of N = {N} with an odd number of prime factors")
    return [N1]


def _kappa(text: str) -> Fraction:
    try:
        k = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text}") from None
    if not 0 < k < 1:
        raise argparse.ArgumentTypeError("kappa must lie strictly between 0 and 1")
    return k


def _d_values(d_max: int, fundamental_only: bool) -> list[int]:
    return [d for d in range(3, d_max + 1) if is_discriminant(-d) and (not fundamental_only or is_fundamental(d))]


# --- report engine ---------------------------------------------------------------------

def _report_chunk(args):
    cfg, ds, kappa, fundamental_only = args
    return theorem_reports(cfg, ds, kappa, fundamental_only)


def run_reports(cfg: Configuration, d_max: int, kappa: Fraction, fundamental_only: bool,
                workers: int = 1) -> VerificationReport:
    ds = _d_values(d_max, fundamental_only)
    t0 = time.perf_counter()
    if workers <= 1 or len(ds) < 2 * workers:
        report = theorem_reports(cfg, ds, kappa, fundamental_only)
    else:
        chunks = [ds[k::workers] for k in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_report_chunk, [(cfg, c, kappa, fundamental_only) for c in chunks]))
        report = theorem_reports(cfg, [], kappa, fundamental_only)
        for part in parts:
            report.rows.extend(part.rows)
            report.propositions.extend(part.propositions)
            report.inequalities.extend(part.inequalities)
        report.rows.sort(key=lambda r: (r.d, r.i, r.j))
        report.propositions.sort(key=lambda p: p.d)
        report.inequalities.sort(key=lambda q: (q.d, q.T, q.i, q.j))
    report.d_max = d_max
    # the admissibility scan covers the full range whatever the chunking
    report.exceptions = admissibility_exceptions(cfg, d_max)
    report.timings = {**report.timings, "total": time.perf_counter() - t0, "workers": workers}
    return report


def _write_reports(reports: list[VerificationReport], out: str | None, fmt: str) -> None:
    if fmt == "csv":
        text = reports[0].csv_text() if reports else ""
        for r in reports[1:]:
            text += r.csv_text().split("\n", 1)[1]
    else:
        doc = {
            "data": [r.to_data() for r in reports],
            "meta": {"version": __version__, "timings": [r.timings for r in reports]},
        }
        text = json.dumps(doc, indent=1, sort_keys=True) + "\n"
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


# --- commands -------------------------------------------------------------------------

def cmd_construct(ns) -> int:
    for N1 in _splits(ns.N, ns.N1):
        cfg = load_configuration(ns.N, N1, use_cache=not ns.no_cache)
        fails = check_certificates(cfg)
        if fails:
            raise ConstructionError("; ".join(fails))
        print(f"N = {cfg.N} = {cfg.N1} * {cfg.N2}")
        print(f"  class number h = {cfg.h}")
        print(f"  unit counts e_i = {', '.join(map(str, cfg.classes.unit_counts))}")
        print(f"  mass = {cfg.classes.mass}")
        print(f"  quaternary genus: {len(cfg.genus)} classes, mu = {genus_mass(cfg.genus)}, "
              f"o_max = {genus_omax(cfg.genus)}")
        print(f"  ternary genus: {len(cfg.ternary_genus)} classes, mu = {genus_mass(cfg.ternary_genus)}")
        print(f"  certificates: ok (cache: {_cache_path(cfg.N, cfg.N1) if not ns.no_cache else 'disabled'})")
    return EXIT_OK


def _reports_for(ns) -> list[VerificationReport]:
    workers = ns.workers if ns.workers else (os.cpu_count() or 1)
    out = []
    for N1 in _splits(ns.N, ns.N1):
        cfg = load_configuration(ns.N, N1, use_cache=not ns.no_cache)
        out.append(run_reports(cfg, ns.dmax, ns.kappa, ns.fundamental_only, workers))
    return out


def cmd_verify(ns) -> int:
    reports = _reports_for(ns)
    if ns.out:
        _write_reports(reports, ns.out, ns.format)
    code = EXIT_OK
    for r in reports:
        fails = r.failures()
        status = "FAIL" if fails else "ok"
        print(f"N = {r.N} (N1 = {r.N1}), d <= {r.d_max}: {len(r.rows)} identity rows, "
              f"{len(r.propositions)} fundamental d, exact checks {status}")
        for line in r.discrepancies():
            print(f"  as stated: {line}")
        if fails:
            print(f"  first counterexample: {fails[0]}", file=sys.stderr)
            code = EXIT_COUNTEREXAMPLE
    return code


def cmd_survey(ns) -> int:
    reports = _reports_for(ns)
    _write_reports(reports, ns.out, ns.format)
    return EXIT_OK


def cmd_export_lattice(ns) -> int:
    N1 = _splits(ns.N, ns.N1)[0]
    cfg = load_configuration(ns.N, N1, use_cache=not ns.no_cache)
    h = cfg.h
    if ns.kind == "ternary":
        if not 1 <= ns.i <= h:
            raise UsageError(f"i must lie in 1..{h}")
        L = cfg.ternaries[ns.i - 1]
    else:
        if not (1 <= ns.i <= h and 1 <= ns.j <= h):
            raise UsageError(f"i and j must lie in 1..{h}")
        if ns.s is not None and cfg.N % ns.s:
            raise UsageError(f"s must divide N = {cfg.N}")
        L = cfg.rpd[(ns.i, ns.j, ns.s or 1)]
    text = json.dumps(L.to_json()) + "\n"
    if ns.out:
        Path(ns.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_represent(ns) -> int:
    try:
        L = GramLattice.from_json(json.loads(Path(ns.lattice).read_text()))
    except (OSError, ValueError, KeyError) as e:
        raise UsageError(f"cannot read lattice: {e}") from None
    if ns.n is not None:
        print(count_unary(L, ns.n))
    else:
        a, b, c = ns.form
        if b * b - 4 * a * c >= 0 or a <= 0:
            raise UsageError("form must be positive definite")
        print(count_binary(L, (a, b, c)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="quatlat", description="Eichler order lattices and representation identities.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def level_args(sp):
        sp.add_argument("--N", type=int, required=True, help="squarefree level")
        sp.add_argument("--N1", type=int, help="ramified part (default: every admissible split)")
        sp.add_argument("--no-cache", action="store_true", help="neither read nor write the configuration cache")

    c = sub.add_parser("construct", help="build and certify configurations")
    level_args(c)
    c.set_defaults(func=cmd_construct)

    for name, func, helptext in (
        ("verify", cmd_verify, "check the exact identities, exit 1 on a counterexample"),
        ("survey", cmd_survey, "write the full per-d report"),
    ):
        v = sub.add_parser(name, help=helptext)
        level_args(v)
        v.add_argument("--dmax", type=int, required=True)
        v.add_argument("--fundamental-only", action="store_true")
        v.add_argument("--kappa", type=_kappa, default=Fraction(1, 2))
        v.add_argument("--out", help="output file (default stdout for survey, none for verify)")
        v.add_argument("--format", choices=("json", "csv"), default="json")
        v.add_argument("--workers", type=int, default=0, help="worker processes (default: all cores)")
        v.set_defaults(func=func)

    e = sub.add_parser("export-lattice", help="write one lattice in the lattice JSON format")
    level_args(e)
    e.add_argument("--kind", choices=("quaternary", "ternary"), default="quaternary")
    e.add_argument("--i", type=int, default=1)
    e.add_argument("--j", type=int, default=1)
    e.add_argument("--s", type=int, help="rescaled partial dual at s | N")
    e.add_argument("--out")
    e.set_defaults(func=cmd_export_lattice)

    r = sub.add_parser("represent", help="representation numbers of a lattice JSON file")
    r.add_argument("--lattice", required=True)
    g = r.add_mutually_exclusive_group(required=True)
    g.add_argument("--n", type=int, help="count vectors with q(x) = n")
    g.add_argument("--form", type=int, nargs=3, metavar=("A", "B", "C"), help="count representations of Ax^2+Bxy+Cy^2")
    r.set_defaults(func=cmd_represent)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    if getattr(ns, "dmax", 0) is not None and getattr(ns, "dmax", 0) < 0:
        parser.error("--dmax must be non-negative")
    try:
        return ns.func(ns)
    except UsageError as e:
        print(f"quatlat: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ConstructionError, AlgebraSearchError) as e:
        print(f"quatlat: construction failed: {e}", file=sys.stderr)
        return EXIT_CONSTRUCTION


if __name__ == "__main__":
    sys.exit(main())
