"""Averaged representation numbers and the exact identities relating them.

A :class:`Configuration` bundles everything attached to one decomposition
N = N1 * N2: the Eichler order, its ideal classes, the normalised quaternary
lattices I_ij, their rescaled partial duals, the ternary lattices L_i and the
isometry classes of both genera.

Left and right hand sides are always computed independently. Where a statement
only holds up to a systematic constant, the ratio is reported next to it.
"""

from __future__ import annotations

import csv
import io
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import isqrt
from typing import Iterable, Sequence

from sympy import divisors, isprime

from . import binary as bf
from .lattice import (
    GramLattice,
    automorphism_count,
    count_binary,
    count_binary_primitive,
    count_unary,
    isometric,
    rescaled_partial_dual,
)
from .orders import (
    ClassSet,
    eichler_mass,
    eichler_order,
    ideal_classes,
    ideal_to_lattice,
    make_Iij,
    maximal_order,
    ternary_lattice,
)
from .quaternion import find_algebra, primes_of

__all__ = [
    "GenusClass",
    "Configuration",
    "build_configuration",
    "decompositions",
    "configuration_to_json",
    "configuration_from_json",
    "check_certificates",
    "average_binary",
    "lhs_identity",
    "lhs_prime_level",
    "rhs_identity",
    "IdentityRecord",
    "check_identity",
    "siegel_average",
    "genus_mass",
    "genus_omax",
    "ternary_genus_average",
    "Proposition",
    "verify_proposition",
    "proposition_by_summation",
    "rpd_average",
    "rpd_count",
    "count_represented",
    "InequalityRecord",
    "proof_inequality",
    "admissibility_exceptions",
    "ReportRow",
    "VerificationReport",
    "theorem_reports",
    "best_ratio",
]


@dataclass(frozen=True)
class GenusClass:
    lattice: GramLattice
    automorphisms: int


@dataclass
class Configuration:
    N: int
    N1: int
    N2: int
    classes: ClassSet
    quaternary: dict[tuple[int, int], GramLattice]
    ternaries: tuple[GramLattice, ...]
    rpd: dict[tuple[int, int, int], GramLattice]
    genus: tuple[GenusClass, ...]
    genus_index: dict[tuple[int, int, int], int]
    ternary_genus: tuple[GenusClass, ...]
    ternary_index: tuple[int, ...]
    timings: dict[str, float] = field(default_factory=dict, compare=False)

    @property
    def h(self) -> int:
        return self.classes.h

    @property
    def is_prime_level(self) -> bool:
        return isprime(self.N)

    def pairs(self) -> list[tuple[int, int]]:
        return [(i, j) for i in range(1, self.h + 1) for j in range(1, self.h + 1)]

    def rpd_class(self, i: int, j: int, s: int) -> GramLattice:
        """The genus representative isometric to I_ij^{*,s}."""
        return self.genus[self.genus_index[(i, j, s)]].lattice


def configuration_to_json(cfg: Configuration) -> dict:
    return {
        "N": cfg.N,
        "N1": cfg.N1,
        "N2": cfg.N2,
        "classes": cfg.classes.to_json(),
        "quaternary": [[i, j, L.to_json()] for (i, j), L in sorted(cfg.quaternary.items())],
        "ternaries": [L.to_json() for L in cfg.ternaries],
        "rpd": [[i, j, s, L.to_json()] for (i, j, s), L in sorted(cfg.rpd.items())],
        "genus": [{"lattice": c.lattice.to_json(), "automorphisms": c.automorphisms} for c in cfg.genus],
        "genus_index": [[i, j, s, k] for (i, j, s), k in sorted(cfg.genus_index.items())],
        "ternary_genus": [{"lattice": c.lattice.to_json(), "automorphisms": c.automorphisms} for c in cfg.ternary_genus],
        "ternary_index": list(cfg.ternary_index),
    }


def configuration_from_json(doc: dict) -> Configuration:
    lat = GramLattice.from_json
    return Configuration(
        doc["N"], doc["N1"], doc["N2"],
        ClassSet.from_json(doc["classes"]),
        {(i, j): lat(L) for i, j, L in doc["quaternary"]},
        tuple(lat(L) for L in doc["ternaries"]),
        {(i, j, s): lat(L) for i, j, s, L in doc["rpd"]},
        tuple(GenusClass(lat(c["lattice"]), c["automorphisms"]) for c in doc["genus"]),
        {(i, j, s): k for i, j, s, k in doc["genus_index"]},
        tuple(GenusClass(lat(c["lattice"]), c["automorphisms"]) for c in doc["ternary_genus"]),
        tuple(doc["ternary_index"]),
    )


def decompositions(N: int) -> list[int]:
    """All N1 | N with an odd number of prime factors (N squarefree)."""
    ps = primes_of(N)
    if any(N % (p * p) == 0 for p in ps):
        raise ValueError(f"N = {N} is not squarefree")
    return [n1 for n1 in divisors(N) if len(primes_of(n1)) % 2 == 1]


def _classify(lattices: Iterable[GramLattice]) -> tuple[list[GenusClass], list[int]]:
    classes: list[GenusClass] = []
    index = []
    for L in lattices:
        for k, c in enumerate(classes):
            if isometric(L, c.lattice) is not None:
                index.append(k)
                break
        else:
            classes.append(GenusClass(L, automorphism_count(L)))
            index.append(len(classes) - 1)
    return classes, index


def build_configuration(N: int, N1: int, classes: ClassSet | None = None) -> Configuration:
    if N1 not in decompositions(N):
        raise ValueError(f"N1 = {N1} is not an admissible factor of N = {N} (must divide N with odd omega)")
    N2 = N // N1
    t0 = time.perf_counter()
    if classes is None:
        R = eichler_order(maximal_order(find_algebra(N1)), N2)
        classes = ideal_classes(R, N1, N2)
    t1 = time.perf_counter()
    h = classes.h
    quaternary = {(i, j): ideal_to_lattice(make_Iij(classes, i, j)) for i in range(1, h + 1) for j in range(1, h + 1)}
    ternaries = tuple(ternary_lattice(o) for o in classes.right_orders)
    rpd = {(i, j, s): (L if s == 1 else rescaled_partial_dual(L, s)) for (i, j), L in quaternary.items() for s in divisors(N)}
    # I_ij themselves first, so genus[0] is one of them
    keys = sorted(rpd, key=lambda k: (k[2] != 1, k))
    genus, idx = _classify(rpd[k] for k in keys)
    genus_index = dict(zip(keys, idx))
    tgenus, tidx = _classify(ternaries)
    t2 = time.perf_counter()
    return Configuration(
        N, N1, N2, classes, quaternary, ternaries, rpd, tuple(genus), genus_index, tuple(tgenus), tuple(tidx),
        timings={"classes": t1 - t0, "lattices": t2 - t1},
    )


def check_certificates(cfg: Configuration) -> list[str]:
    """Exact construction checks; returns a list of failures (empty when all hold)."""
    fails = []
    N = cfg.N
    if cfg.classes.mass != eichler_mass(cfg.N1, cfg.N2):
        fails.append(f"mass {cfg.classes.mass} != Eichler mass {eichler_mass(cfg.N1, cfg.N2)}")
    for key, L in cfg.quaternary.items():
        if L.discriminant() != N * N or L.level() != N:
            fails.append(f"I{key}: discriminant {L.discriminant()}, level {L.level()}")
    for key, L in cfg.rpd.items():
        if L.discriminant() != N * N or L.level() != N:
            fails.append(f"I{key[:2]}^(*,{key[2]}): discriminant {L.discriminant()}, level {L.level()}")
    for i, L in enumerate(cfg.ternaries, 1):
        if L.discriminant() != 32 * N * N or L.level() != 4 * N:
            fails.append(f"L{i}: discriminant {L.discriminant()}, level {L.level()}")
    return fails


# --- averaged counts -----------------------------------------------------------

@lru_cache(maxsize=1 << 16)
def average_binary(L: GramLattice, d: int, primitive: bool = False) -> Fraction:
    """sum over classes T of discriminant -d of r(L, T) / eps(T)."""
    count = count_binary_primitive if primitive else count_binary
    return sum(
        (Fraction(count(L, T.as_tuple()), bf.unit_count(T)) for T in bf.class_list(d)),
        Fraction(0),
    )


def _square_divisor_discs(d: int) -> list[int]:
    """d / m^2 for m^2 | d with -d/m^2 still a discriminant."""
    out = []
    for m in range(1, isqrt(d) + 1):
        if d % (m * m) == 0 and bf.is_discriminant(-(d // (m * m))):
            out.append(d // (m * m))
    return out


def lhs_identity(cfg: Configuration, i: int, j: int, d: int) -> Fraction:
    """sum_{s | N_d} sum_{m^2 | d} r*(I_ij^{*,s}, d / m^2)."""
    total = Fraction(0)
    for s in divisors(bf.Nd(cfg.N, d)):
        L = cfg.rpd_class(i, j, s)
        for dd in _square_divisor_discs(d):
            total += average_binary(L, dd, True)
    return total


def lhs_prime_level(cfg: Configuration, i: int, j: int, d: int) -> Fraction:
    """sum_{m^2 | d} r*(I_ij, d / m^2), the left side of the prime-level form."""
    L = cfg.quaternary[(i, j)]
    return sum((average_binary(L, dd, True) for dd in _square_divisor_discs(d)), Fraction(0))


def rhs_identity(cfg: Configuration, i: int, j: int, d: int) -> int:
    """r(L_i, d) * r(L_j, d)."""
    return count_unary(cfg.ternaries[i - 1], d) * count_unary(cfg.ternaries[j - 1], d)


@dataclass(frozen=True)
class IdentityRecord:
    N: int
    i: int
    j: int
    d: int
    lhs: Fraction
    rhs: int
    match: bool
    prime_lhs: Fraction | None = None
    prime_match: bool | None = None
    prime_applicable: bool | None = None


def check_identity(cfg: Configuration, i: int, j: int, d: int) -> IdentityRecord:
    lhs = lhs_identity(cfg, i, j, d)
    rhs = rhs_identity(cfg, i, j, d)
    if not cfg.is_prime_level:
        return IdentityRecord(cfg.N, i, j, d, lhs, rhs, lhs == rhs)
    plhs = lhs_prime_level(cfg, i, j, d)
    return IdentityRecord(
        cfg.N, i, j, d, lhs, rhs, lhs == rhs,
        prime_lhs=plhs, prime_match=(plhs == Fraction(rhs, 2)), prime_applicable=(d % cfg.N != 0),
    )


# --- genus statistics ------------------------------------------------------------

def genus_mass(genus: Sequence[GenusClass]) -> Fraction:
    return sum((Fraction(1, c.automorphisms) for c in genus), Fraction(0))


def genus_omax(genus: Sequence[GenusClass]) -> int:
    return max(c.automorphisms for c in genus)


def siegel_average(genus: Sequence[GenusClass], T) -> Fraction:
    """Class average of r(., T) weighted by 1/|O(L)|."""
    if not genus:
        raise ValueError("empty genus")
    T = T.as_tuple() if isinstance(T, bf.BinaryFormClass) else tuple(T)
    num = sum((Fraction(count_binary(c.lattice, T), c.automorphisms) for c in genus), Fraction(0))
    return num / genus_mass(genus)


def ternary_genus_average(genus: Sequence[GenusClass], d: int) -> Fraction:
    num = sum((Fraction(count_unary(c.lattice, d), c.automorphisms) for c in genus), Fraction(0))
    return num / genus_mass(genus)


def best_ratio(lhs, rhs) -> Fraction | None:
    if rhs == 0:
        return None
    return Fraction(lhs) / Fraction(rhs)


@dataclass(frozen=True)
class Proposition:
    d: int
    h: int
    sigma0: int
    unit_weight: Fraction  # sum over classes of 1/eps(T)
    siegel: tuple[Fraction, ...]  # r(gen(R), T) per class T
    t_independent: bool
    ternary_average: Fraction  # r(gen(L), d)
    lhs: Fraction  # h * sigma0 * r(gen(R), T)
    rhs: Fraction  # r(gen(L), d)^2
    match: bool
    ratio: Fraction | None
    weighted_lhs: Fraction  # sigma0 * r(gen(R), T) * sum 1/eps(T)
    weighted_match: bool


def verify_proposition(cfg: Configuration, d: int) -> Proposition:
    if not bf.is_fundamental(d):
        raise ValueError(f"-{d} is not fundamental")
    Ts = bf.class_list(d)
    siegel = tuple(siegel_average(cfg.genus, T) for T in Ts)
    sigma0 = bf.divisor_count(bf.Nd(cfg.N, d))
    rL = ternary_genus_average(cfg.ternary_genus, d)
    lhs = len(Ts) * sigma0 * siegel[0]
    rhs = rL * rL
    weight = sum((Fraction(1, bf.unit_count(T)) for T in Ts), Fraction(0))
    wlhs = sigma0 * siegel[0] * weight
    return Proposition(
        d, len(Ts), sigma0, weight, siegel, len(set(siegel)) == 1, rL,
        lhs, rhs, lhs == rhs, best_ratio(lhs, rhs), wlhs, wlhs == rhs,
    )


def proposition_by_summation(cfg: Configuration, d: int) -> Fraction:
    """sum_{i,j} 1/(e_i e_j) sum_{s | N_d} r(I_ij^{*,s}, d), divided by the squared Eichler mass.

    For fundamental -d this equals both the weighted proposition left side and
    r(gen(L), d)^2, reached through the identity summed over i, j.
    """
    e = cfg.classes.unit_counts
    total = Fraction(0)
    for i, j in cfg.pairs():
        inner = sum((average_binary(cfg.rpd_class(i, j, s), d) for s in divisors(bf.Nd(cfg.N, d))), Fraction(0))
        total += inner / (e[i - 1] * e[j - 1])
    return total / cfg.classes.mass ** 2


# --- rescaled partial duals and represented classes -------------------------------

def rpd_average(cfg: Configuration, i: int, j: int, Nprime: int, d: int) -> Fraction:
    """r(rpd(I_ij, N'), d) = sum_{s | N'} r(I_ij^{*,s}, d)."""
    if cfg.N % Nprime:
        raise ValueError("N' must divide N")
    return sum((average_binary(cfg.rpd_class(i, j, s), d) for s in divisors(Nprime)), Fraction(0))


def rpd_count(cfg: Configuration, i: int, j: int, Nprime: int, T) -> int:
    T = T.as_tuple() if isinstance(T, bf.BinaryFormClass) else tuple(T)
    return sum(count_binary(cfg.rpd_class(i, j, s), T) for s in divisors(Nprime))


def count_represented(cfg: Configuration, i: int, j: int, Nprime: int, d: int) -> tuple[int, int]:
    """(nu, nu') for discriminant -d: classes represented by rpd(I_ij, N') resp. by I_ij."""
    nu = nu_p = 0
    for T in bf.class_list(d):
        if rpd_count(cfg, i, j, Nprime, T) > 0:
            nu += 1
        if count_binary(cfg.quaternary[(i, j)], T.as_tuple()) > 0:
            nu_p += 1
    return nu, nu_p


@dataclass(frozen=True)
class InequalityRecord:
    i: int
    j: int
    d: int
    T: tuple[int, int, int]
    rpd: int  # r(rpd(I_ij, N_d), T)
    largest_term: int  # max over s of r(I_ij^{*,s}, T)
    bound: Fraction  # o_max * mu * r(gen(R), T)
    holds: bool
    holds_termwise: bool


def proof_inequality(cfg: Configuration, d: int) -> list[InequalityRecord]:
    mu = genus_mass(cfg.genus)
    omax = genus_omax(cfg.genus)
    Ndv = bf.Nd(cfg.N, d)
    out = []
    for T in bf.class_list(d):
        bound = omax * mu * siegel_average(cfg.genus, T)
        for i, j in cfg.pairs():
            terms = [count_binary(cfg.rpd_class(i, j, s), T.as_tuple()) for s in divisors(Ndv)]
            out.append(InequalityRecord(
                i, j, d, T.as_tuple(), sum(terms), max(terms), bound, sum(terms) <= bound, max(terms) <= bound,
            ))
    return out


def admissibility_exceptions(cfg: Configuration, d_max: int) -> list[dict]:
    """Fundamental d <= d_max where the local criterion disagrees with r(L_i, d) > 0 for some i."""
    out = []
    for d in range(3, d_max + 1):
        if not bf.is_fundamental(d):
            continue
        adm = bf.local_admissible(d, cfg.N1, cfg.N2)
        positive = [count_unary(L, d) > 0 for L in cfg.ternaries]
        if any(p != adm for p in positive):
            out.append({"d": d, "admissible": adm, "positive": positive})
    return out


# --- reports ---------------------------------------------------------------------

@dataclass(frozen=True)
class ReportRow:
    N: int
    N1: int
    N2: int
    i: int
    j: int
    d: int
    fundamental: bool
    admissible: bool | None
    h: int
    lhs: Fraction
    rhs: int
    match: bool
    nu: int
    nu_prime: int
    bound_rhs: Fraction | None
    residual: Fraction | None
    prime_lhs: Fraction | None = None
    prime_match: bool | None = None
    prime_applicable: bool | None = None

    CSV_COLUMNS = (
        "N", "N1", "N2", "i", "j", "d", "fundamental", "admissible", "h",
        "lhs", "rhs", "match", "nu", "nu_prime", "bound_rhs", "residual",
    )


@dataclass
class VerificationReport:
    N: int
    N1: int
    N2: int
    d_max: int
    kappa: Fraction
    fundamental_only: bool
    rows: list[ReportRow]
    propositions: list[Proposition]
    inequalities: list[InequalityRecord]
    exceptions: list[dict]
    genus_mass: Fraction
    genus_omax: int
    ternary_genus_mass: Fraction
    h: int
    unit_counts: tuple[int, ...]
    class_mass: Fraction
    timings: dict[str, float] = field(default_factory=dict)

    def failures(self) -> list[str]:
        """Exact checks that did not hold (see README for which checks are exact)."""
        out = []
        for r in self.rows:
            if not r.match:
                out.append(f"identity N={r.N} i={r.i} j={r.j} d={r.d}: lhs={r.lhs} rhs={r.rhs}")
            if r.prime_applicable and not r.prime_match:
                out.append(f"prime-level identity N={r.N} i={r.i} j={r.j} d={r.d}: lhs={r.prime_lhs} rhs={Fraction(r.rhs, 2)}")
        for p in self.propositions:
            if not p.t_independent:
                out.append(f"siegel average not T-independent at d={p.d}: {p.siegel}")
            if not p.weighted_match:
                out.append(f"proposition d={p.d}: weighted lhs={p.weighted_lhs} rhs={p.rhs}")
        for q in self.inequalities:
            if not q.holds_termwise:
                out.append(f"inequality d={q.d} T={q.T} i={q.i} j={q.j}: {q.largest_term} > {q.bound}")
        return out


    def discrepancies(self) -> list[str]:
        """Statements checked as literally written that fail, each with its fitted ratio."""
        out = []
        bad = [r for r in self.rows if r.prime_match is False]
        if bad:
            ratios = sorted({best_ratio(r.prime_lhs, Fraction(r.rhs, 2)) for r in bad if r.rhs})
            where = "all with N | d" if all(not r.prime_applicable for r in bad) else "including N coprime to d"
            out.append(f"prime-level form with 1/2: {len(bad)} mismatches ({where}); lhs/rhs in {_fmt_set(ratios)}")
        bad_p = [p for p in self.propositions if not p.match]
        if bad_p:
            ratios = sorted({p.ratio for p in bad_p if p.ratio is not None})
            out.append(f"proposition h*sigma0*r(gen(R),T) = r(gen(L),d)^2: {len(bad_p)} mismatches; "
                       f"lhs/rhs in {_fmt_set(ratios)} (h(-d) divided by the sum of 1/eps(T) in each case)")
        bad_i = [q for q in self.inequalities if not q.holds]
        if bad_i:
            worst = max(Fraction(q.rpd) / q.bound for q in bad_i)
            out.append(f"inequality for the summed partial duals: {len(bad_i)} violations, worst rpd/bound = {worst}")
        if self.exceptions:
            out.append(f"local criterion vs r(L_i, d) > 0: {len(self.exceptions)} exceptional d: "
                       + ", ".join(str(e["d"]) for e in self.exceptions))
        return out

    def to_data(self) -> dict:
        """Deterministic data section (no timings)."""
        return {
            "N": self.N, "N1": self.N1, "N2": self.N2, "d_max": self.d_max, "kappa": _q(self.kappa),
            "fundamental_only": self.fundamental_only, "h": self.h, "unit_counts": list(self.unit_counts),
            "class_mass": _q(self.class_mass), "genus_mass": _q(self.genus_mass), "genus_omax": self.genus_omax,
            "ternary_genus_mass": _q(self.ternary_genus_mass),
            "rows": [_jsonable(asdict(r)) for r in self.rows],
            "propositions": [_jsonable(asdict(p)) for p in self.propositions],
            "inequalities": [_jsonable(asdict(q)) for q in self.inequalities],
            "admissibility_exceptions": self.exceptions,
            "failures": self.failures(),
            "discrepancies": self.discrepancies(),
        }

    def csv_text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(ReportRow.CSV_COLUMNS)
        for r in self.rows:
            w.writerow(_csv_cell(getattr(r, c)) for c in ReportRow.CSV_COLUMNS)
        return buf.getvalue()


def _q(x) -> str | None:
    if x is None:
        return None
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return _q(obj)
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Fraction):
        return _q(v)
    return str(v)


def _fmt_set(xs) -> str:
    return "{" + ", ".join(str(x) for x in xs) + "}"


def theorem_reports(cfg: Configuration, d_range: Iterable[int], kappa: Fraction = Fraction(1, 2),
                    fundamental_only: bool = False) -> VerificationReport:
    kappa = Fraction(kappa)
    if not 0 < kappa < 1:
        raise ValueError("kappa must lie in (0, 1)")
    t0 = time.perf_counter()
    mu = genus_mass(cfg.genus)
    omax = genus_omax(cfg.genus)
    rows: list[ReportRow] = []
    props: list[Proposition] = []
    ineqs: list[InequalityRecord] = []
    d_list = sorted(d_range)
    for d in d_list:
        if d < 3 or not bf.is_discriminant(-d):
            continue
        fund = bf.is_fundamental(d)
        if fundamental_only and not fund:
            continue
        Ts = bf.class_list(d)
        Ndv = bf.Nd(cfg.N, d)
        adm = bf.local_admissible(d, cfg.N1, cfg.N2) if fund else None
        prop = verify_proposition(cfg, d) if fund else None
        if prop is not None:
            props.append(prop)
            ineqs.extend(proof_inequality(cfg, d))
        for i, j in cfg.pairs():
            rec = check_identity(cfg, i, j, d)
            nu, nu_p = count_represented(cfg, i, j, Ndv, d)
            bound = kappa * bf.divisor_count(Ndv) * len(Ts) / (mu * omax) if fund else None
            residual = None
            if fund and cfg.is_prime_level:
                residual = average_binary(cfg.quaternary[(i, j)], d) - len(Ts) * prop.siegel[0]
            rows.append(ReportRow(
                cfg.N, cfg.N1, cfg.N2, i, j, d, fund, adm, len(Ts),
                rec.lhs, rec.rhs, rec.match, nu, nu_p, bound, residual,
                rec.prime_lhs, rec.prime_match, rec.prime_applicable,
            ))
    d_max = max(d_list) if d_list else 0
    exc = admissibility_exceptions(cfg, d_max)
    return VerificationReport(
        cfg.N, cfg.N1, cfg.N2, d_max, kappa, fundamental_only, rows, props, ineqs, exc,
        mu, omax, genus_mass(cfg.ternary_genus), cfg.h, cfg.classes.unit_counts, cfg.classes.mass,
        timings={"report": time.perf_counter() - t0, **cfg.timings},
    )
