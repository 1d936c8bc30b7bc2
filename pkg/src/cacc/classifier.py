"""Growth classification of the elementary automata.

The label is computed from the central series: the larger of d at the two
near-central splits n | n+1 and n+1 | n. Taking both makes the label
invariant under reflection, which swaps the two. The worst-split series is
reported and classified alongside.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import accumulate
from typing import Iterable, Sequence

import numpy as np

from .config import DEFAULT_BUDGET, Config
from .errors import BudgetExceeded
from .matrix import CCProfile, cc1_profile
from .rules import RuleTable, canonical_codes, make_eca, orbit

LABELS = ("bounded", "linear", "quadratic", "superquadratic", "non-polynomial", "undetermined")
SERIES = ("central", "worst")

BOUNDED_44 = (
    0, 1, 2, 3, 4, 5, 7, 8, 10, 12, 13, 15, 19, 24, 27, 28, 29, 32, 34, 36, 38, 42,
    46, 51, 60, 72, 76, 78, 90, 105, 108, 128, 130, 136, 138, 140, 150, 156, 160,
    162, 170, 172, 200, 204,
)
# classes with a stated proof: the bounded list, rules 178 and 50, rule 218
PAPER_CLAIMS = {**{c: "bounded" for c in BOUNDED_44}, 178: "linear", 50: "linear", 218: "quadratic"}


# -- sweeping -----------------------------------------------------------------


@dataclass
class Sweep:
    rule: str
    profiles: list[CCProfile]
    stop_reason: str

    def __iter__(self):
        return iter(self.profiles)

    def __len__(self) -> int:
        return len(self.profiles)


def sweep(
    rule: RuleTable,
    n_max: int,
    budget: int = DEFAULT_BUDGET,
    primes: Sequence[int] | None = None,
) -> Sweep:
    """Profiles for n = 1..n_max, stopping early (not raising) at the budget."""
    profiles = []
    reason = f"reached n_max={n_max}"
    for n in range(1, n_max + 1):
        try:
            profiles.append(cc1_profile(rule, n, budget, primes))
        except BudgetExceeded as exc:
            reason = f"stopped before n={n}: {exc}"
            break
    return Sweep(str(rule), profiles, reason)


def central_d(profile: CCProfile) -> int:
    n = profile.n
    return max(profile.splits[n].d, profile.splits[n + 1].d)


def series(profiles: Iterable[CCProfile], kind: str = "central") -> tuple[list[int], list[int]]:
    """(n values, d values) of a sweep for the chosen split policy."""
    if kind not in SERIES:
        raise ValueError(f"unknown series {kind!r}; choose from {SERIES}")
    profiles = list(profiles)
    pick = central_d if kind == "central" else (lambda p: p.worst_d)
    return [p.n for p in profiles], [pick(p) for p in profiles]


# -- growth fitting -------------------------------------------------------------


@dataclass(frozen=True)
class GrowthClass:
    label: str
    exponent: float | None = None
    residual: float | None = None
    r2: float | None = None
    exp_residual: float | None = None
    plateau: int = 0
    reason: str = ""

    def to_dict(self) -> dict:
        def rnd(v):
            return None if v is None else round(v, 6)

        return {
            "label": self.label,
            "exponent": rnd(self.exponent),
            "residual": rnd(self.residual),
            "r2": rnd(self.r2),
            "exp_residual": rnd(self.exp_residual),
            "plateau": self.plateau,
            "reason": self.reason,
        }


def _fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    """Least-squares slope, residual sum of squares and R^2."""
    slope, icept = np.polyfit(x, y, 1)
    rss = float(np.sum((y - (slope * x + icept)) ** 2))
    tss = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if tss == 0 else 1.0 - rss / tss
    return float(slope), rss, r2


def trailing_plateau(d: Sequence[int]) -> int:
    """Length of the final run of equal running-maximum values."""
    peaks = list(accumulate(d, max))
    run = 0
    for v in reversed(peaks):
        if v != peaks[-1]:
            break
        run += 1
    return run


def classify_growth(data, ns: Sequence[int] | None = None, config: Config | None = None,
                    kind: str = "central") -> GrowthClass:
    """Label a d sequence; `data` is a list of CCProfile or of d values.

    Plain values are taken at n = 1, 2, ... unless `ns` is given.
    """
    cfg = config or Config()
    data = list(data)
    if data and isinstance(data[0], CCProfile):
        ns, d = series(data, kind)
    else:
        d = [int(v) for v in data]
        ns = list(ns) if ns is not None else list(range(1, len(d) + 1))
    if len(d) != len(ns):
        raise ValueError("n and d sequences differ in length")
    if len(d) < 5:
        return GrowthClass("undetermined", reason=f"need at least 5 points, got {len(d)}")
    if min(d) < 1:
        raise ValueError("d values are counts and must be >= 1")
    plateau = trailing_plateau(d)
    if plateau >= cfg.plateau_length:
        return GrowthClass("bounded", plateau=plateau, reason=f"running maximum flat over last {plateau}")
    half = len(d) // 2
    x = np.asarray(ns[half:], dtype=float)
    y = np.log(np.asarray(d[half:], dtype=float))
    exponent, rss, r2 = _fit(np.log(x), y)
    _, rss_exp, _ = _fit(x, y)
    out = dict(exponent=exponent, residual=rss, r2=r2, exp_residual=rss_exp, plateau=plateau)
    good = r2 >= cfg.min_r2
    tol = cfg.exponent_tolerance
    if good and abs(exponent - 1) <= tol:
        return GrowthClass("linear", **out, reason="log-log slope near 1")
    if good and abs(exponent - 2) <= tol:
        return GrowthClass("quadratic", **out, reason="log-log slope near 2")
    if rss_exp < rss:
        return GrowthClass("non-polynomial", **out, reason="log d fits n better than log n")
    if good and exponent > cfg.superquadratic_exponent:
        return GrowthClass("superquadratic", **out, reason="log-log slope above threshold")
    return GrowthClass("undetermined", **out, reason="no class fits")


# -- the full classification ------------------------------------------------------


@dataclass
class ClassReport:
    canonical: int
    members: tuple[int, ...]
    profiles: list[CCProfile]
    growth: GrowthClass
    worst_growth: GrowthClass
    stop_reason: str
    orbit_consistent: bool
    n_max: int

    @property
    def ns(self) -> list[int]:
        return [p.n for p in self.profiles]

    @property
    def worst_d(self) -> list[int]:
        return [p.worst_d for p in self.profiles]

    @property
    def central_d(self) -> list[int]:
        return [central_d(p) for p in self.profiles]

    @property
    def paper_class(self) -> str | None:
        for c in self.members:
            if c in PAPER_CLAIMS:
                return PAPER_CLAIMS[c]
        return None

    @property
    def paper_confirmed(self) -> bool:
        return self.paper_class is not None

    def to_dict(self) -> dict:
        return {
            "canonical": self.canonical,
            "members": list(self.members),
            "n": self.ns,
            "worst_d": self.worst_d,
            "worst_cc1": [p.worst_cc1 for p in self.profiles],
            "central_d": self.central_d,
            "s_n": [p.s_n for p in self.profiles],
            "rank_lb": [p.rank_lb for p in self.profiles],
            "class": self.growth.label,
            "growth": self.growth.to_dict(),
            "worst_split_class": self.worst_growth.label,
            "worst_split_growth": self.worst_growth.to_dict(),
            "evidence": f"empirical at n_max={self.n_max}",
            "paper_confirmed": self.paper_confirmed,
            "paper_class": self.paper_class,
            "orbit_consistent": self.orbit_consistent,
            "stop_reason": self.stop_reason,
        }


def _sweep_job(args) -> tuple[int, Sweep]:
    code, n_max, budget, primes = args
    return code, sweep(make_eca(code), n_max, budget, primes)


def _run_jobs(jobs: list, workers: int) -> dict[int, Sweep]:
    if workers <= 1 or len(jobs) <= 1:
        return dict(map(_sweep_job, jobs))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return dict(pool.map(_sweep_job, jobs, chunksize=1))


def _split_multiset(p: CCProfile) -> list[int]:
    return sorted(s.d for s in p.splits)


def classify_all(n_max: int | None = None, config: Config | None = None,
                 codes: Iterable[int] | None = None) -> list[ClassReport]:
    """One report per symmetry class, in canonical-code order.

    Every orbit member is swept independently; ranks are computed for the
    canonical member only. Output does not depend on the worker count.
    """
    cfg = config or Config()
    n_max = cfg.n_max if n_max is None else n_max
    canon = canonical_codes() if codes is None else sorted({orbit(c)[0] for c in codes})
    jobs = []
    for c in canon:
        for member in orbit(c):
            primes = cfg.primes if member == c else None
            jobs.append((member, n_max, cfg.memory_budget_bytes, primes))
    results = _run_jobs(jobs, cfg.workers)
    reports = []
    for c in canon:
        members = orbit(c)
        base = results[c]
        consistent = True
        for m in members:
            other = results[m]
            if [p.worst_d for p in other] != [p.worst_d for p in base]:
                consistent = False
            elif [_split_multiset(p) for p in other] != [_split_multiset(p) for p in base]:
                consistent = False
            elif [central_d(p) for p in other] != [central_d(p) for p in base]:
                consistent = False
        reports.append(ClassReport(
            canonical=c,
            members=members,
            profiles=base.profiles,
            growth=classify_growth(base.profiles, config=cfg, kind="central"),
            worst_growth=classify_growth(base.profiles, config=cfg, kind="worst"),
            stop_reason=base.stop_reason,
            orbit_consistent=consistent,
            n_max=n_max,
        ))
    return reports


REPORT_CSV_FIELDS = [
    "canonical", "members", "n", "d", "cc1", "rank_lb", "class", "paper_confirmed",
    "central_d", "worst_split_class", "s_n",
]


def reports_to_csv(reports: Iterable[ClassReport]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=REPORT_CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for r in reports:
        for p in r.profiles:
            writer.writerow({
                "canonical": r.canonical,
                "members": " ".join(map(str, r.members)),
                "n": p.n,
                "d": p.worst_d,
                "cc1": p.worst_cc1,
                "rank_lb": "" if p.rank_lb is None else p.rank_lb,
                "class": r.growth.label,
                "paper_confirmed": int(r.paper_confirmed),
                "central_d": central_d(p),
                "worst_split_class": r.worst_growth.label,
                "s_n": " ".join(map(str, p.s_n)),
            })
    return buf.getvalue()


def reports_to_text(reports: Sequence[ClassReport]) -> str:
    lines = [f"{'rule':>4}  {'members':<16} {'d(central)':>10} {'d(worst)':>8}  {'class':<15} "
             f"{'worst-split':<15} paper"]
    for r in reports:
        lines.append(
            f"{r.canonical:>4}  {','.join(map(str, r.members)):<16} {r.central_d[-1]:>10} "
            f"{r.worst_d[-1]:>8}  {r.growth.label:<15} {r.worst_growth.label:<15} {r.paper_class or '-'}"
        )
    counts = {lab: sum(r.growth.label == lab for r in reports) for lab in LABELS}
    lines.append("")
    lines.append("  ".join(f"{k}: {v}" for k, v in counts.items() if v))
    if reports:
        lines.append(f"labels are empirical at n_max={reports[0].n_max}")
    return "\n".join(lines) + "\n"


# -- rank versus one-round cost ------------------------------------------------------


@dataclass(frozen=True)
class RankRow:
    rule: int
    n: int
    d: int
    rank_lb: int
    ratio: float | None  # None when d = 1

    def to_dict(self) -> dict:
        return {"rule": self.rule, "n": self.n, "d": self.d, "rank_lb": self.rank_lb,
                "ratio": None if self.ratio is None else round(self.ratio, 6)}


@dataclass
class RankReport:
    rows: list[RankRow] = field(default_factory=list)
    degenerate: list[int] = field(default_factory=list)
    flagged: list[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"rows": [r.to_dict() for r in self.rows], "degenerate": self.degenerate,
                "flagged": self.flagged}


def _trends_below_half(ratios: list[float]) -> bool:
    """Last ratio under 1/2 and not rising over the trailing half."""
    if len(ratios) < 2 or ratios[-1] >= 0.5:
        return False
    tail = ratios[len(ratios) // 2:]
    if len(tail) < 2:
        return True
    slope = np.polyfit(np.arange(len(tail), dtype=float), np.asarray(tail), 1)[0]
    return bool(slope <= 1e-12)


def rank_vs_cc1_report(rules: Iterable[int], n_max: int, config: Config | None = None) -> RankReport:
    """Worst-split d against the rank lower bound, per rule and n."""
    cfg = config or Config()
    rules = list(rules)
    jobs = [(c, n_max, cfg.memory_budget_bytes, cfg.primes) for c in rules]
    results = _run_jobs(jobs, cfg.workers)
    report = RankReport()
    for c in rules:
        ratios = []
        for p in results[c]:
            d = p.worst_d
            ratio = None if d == 1 else math.log2(max(p.rank_lb, 1)) / math.log2(d)
            report.rows.append(RankRow(c, p.n, d, p.rank_lb, ratio))
            if ratio is not None:
                ratios.append(ratio)
        if not ratios:
            report.degenerate.append(c)
        elif _trends_below_half(ratios):
            report.flagged.append(c)
    return report


__all__ = [
    "BOUNDED_44", "ClassReport", "GrowthClass", "LABELS", "PAPER_CLAIMS", "RankReport", "RankRow",
    "Sweep", "central_d", "classify_all", "classify_growth", "rank_vs_cc1_report",
    "reports_to_csv", "reports_to_text", "series", "sweep", "trailing_plateau",
]
