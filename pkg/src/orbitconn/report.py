"""Per-orbit analysis pipeline, the classification sweep and JSON reports.

Reports are JSON with a fixed key order.  Every rational is the string
``"p/q"`` (integers too, e.g. ``"2/1"``); matrices and tensors are sparse
triplet lists.  Wall-clock timings are kept on the in-memory objects and in
verbose logs only, so identical invocations write byte-identical files.
"""

from __future__ import annotations

import hashlib
import json
import logging
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable

from .connection import (
    ADH,
    I,
    IIP,
    ConnectionSpace,
    assemble,
    solve_connection_space,
)
from .exact_linalg import Infeasible
from .flatness import (
    NoFSolution,
    identify_representation,
    lemma4_triple,
    match_named_representation,
    run_checks,
    weights_to_eps,
)
from .lie_core import SUPPORTED, build_algebra
from .orbits import OrbitContext, orbit_catalog

log = logging.getLogger(__name__)

__all__ = [
    "AnalysisReport",
    "TheoremRow",
    "TheoremTable",
    "analyze",
    "expected_feasible",
    "frac",
    "read_report",
    "run_theorem",
    "write_report",
]

CONDITION_ORDER = (I, IIP, ADH)


def frac(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def _sparse_vec(v: Iterable) -> list:
    return [[i, frac(x)] for i, x in enumerate(v) if x]


def _ordered_conditions(conds: Iterable[str]) -> list[str]:
    conds = set(conds)
    return [c for c in CONDITION_ORDER if c in conds]


def certificate_digest(cert: Infeasible, rhs) -> dict:
    items = sorted(cert.certificate.items())
    payload = json.dumps([[i, frac(v)] for i, v in items], separators=(",", ":"))
    return {
        "sha256": hashlib.sha256(payload.encode()).hexdigest(),
        "support": len(items),
        "y_dot_b": frac(sum((v * Fraction(rhs[i]) for i, v in items), Fraction(0))),
    }


@dataclass
class AnalysisReport:
    algebra: str
    orbit_label: str
    weighted_dynkin: list[int] | None
    dims: dict[str, int]
    conditions: list[str]
    system: dict[str, int]
    feasible: bool
    solution_dim: int | None = None
    certificate: dict | None = None
    checks: dict | None = None
    sample_points_flat: bool | None = None
    weights: list[list[str]] | None = None
    representation: str | None = None
    gamma: list | None = None
    triple: dict | None = None
    timings: dict[str, float] = field(default_factory=dict, compare=False)

    def summary_line(self) -> str:
        status = "FEASIBLE" if self.feasible else "INFEASIBLE"
        dim = self.solution_dim if self.feasible else "-"
        return f"{self.algebra} {self.orbit_label} {status} dim(M)={dim}"

    def to_json_dict(self) -> dict:
        return {
            "algebra": self.algebra,
            "orbit": self.orbit_label,
            "weighted_dynkin": self.weighted_dynkin,
            "dims": self.dims,
            "conditions": self.conditions,
            "system": self.system,
            "feasible": self.feasible,
            "solution_dim": self.solution_dim,
            "certificate": self.certificate,
            "checks": self.checks,
            "sample_points_flat": self.sample_points_flat,
            "weights": self.weights,
            "representation": self.representation,
            "triple": self.triple,
            "gamma": self.gamma,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> AnalysisReport:
        return cls(
            algebra=d["algebra"],
            orbit_label=d["orbit"],
            weighted_dynkin=d["weighted_dynkin"],
            dims=d["dims"],
            conditions=d["conditions"],
            system=d["system"],
            feasible=d["feasible"],
            solution_dim=d["solution_dim"],
            certificate=d["certificate"],
            checks=d["checks"],
            sample_points_flat=d["sample_points_flat"],
            weights=d["weights"],
            representation=d["representation"],
            gamma=d["gamma"],
            triple=d["triple"],
        )


def _timed(timings: dict, stage: str, fn, *args):
    t0 = time.perf_counter()
    out = fn(*args)
    timings[stage] = round((time.perf_counter() - t0) * 1000, 3)
    log.info("%s: %.1f ms", stage, timings[stage])
    return out


def analyze(ctx: OrbitContext, conditions: Iterable[str], checks: bool = True) -> tuple[AnalysisReport, ConnectionSpace | Infeasible]:
    """Assemble, solve and (if feasible) check one orbit."""
    timings: dict[str, float] = {}
    conds = _ordered_conditions(conditions)
    system = _timed(timings, "assemble", assemble, ctx, conds)
    result = _timed(timings, "solve", solve_connection_space, system, ctx)
    L = ctx.algebra
    tr = ctx.triple
    report = AnalysisReport(
        algebra=L.name,
        orbit_label=ctx.label,
        weighted_dynkin=list(ctx.dynkin) if ctx.dynkin is not None else None,
        dims={"g": ctx.dim_g, "h": ctx.dim_h, "m": ctx.dim_m},
        conditions=conds,
        system={
            "unknowns": system.unknown_count,
            "rows": system.matrix.nrows,
            "raw_rows": system.raw_row_count,
        },
        feasible=not isinstance(result, Infeasible),
        triple={"f": _sparse_vec(tr.f), "h": _sparse_vec(tr.h), "e": _sparse_vec(tr.e)},
        timings=timings,
    )
    if isinstance(result, Infeasible):
        report.certificate = certificate_digest(result, system.rhs)
        return report, result
    report.solution_dim = result.dim
    report.gamma = [[b, r, c, frac(v)] for b, r, c, v in result.particular.sparse_entries()]
    if checks:
        chk = _timed(timings, "checks", run_checks, result.particular)
        report.checks = chk.as_dict()
        report.sample_points_flat = all(run_checks(p).all_true() for p in result.sample_points())
        if chk.is_representation:
            labels = identify_representation(result.particular)
            eps = [weights_to_eps(L.root_system, w) for w in labels]
            report.weights = [[frac(x) for x in w] for w in eps]
            report.representation = match_named_representation(L.root_system, eps)
    return report, result


def write_report(report: AnalysisReport | TheoremTable, path: str | Path) -> None:
    text = json.dumps(report.to_json_dict(), indent=2) + "\n"
    Path(path).write_text(text)


def read_report(path: str | Path) -> AnalysisReport:
    return AnalysisReport.from_json_dict(json.loads(Path(path).read_text()))


# ---------------------------------------------------------------------------
# classification sweep


def expected_feasible(type_letter: str, rank: int, orbit_label: str) -> bool:
    """Type C (with A1 = C1 and B2 = C2) and the highest-root orbit."""
    symplectic = type_letter == "C" or (type_letter, rank) in {("A", 1), ("B", 2)}
    return symplectic and orbit_label == "minimal"


@dataclass
class TheoremRow:
    algebra: str
    orbit: str
    dims: dict[str, int]
    weighted_dynkin: list[int] | None
    feasible: bool
    expected: bool
    solution_dim: int | None
    feasible_adh: bool
    solution_dim_adh: int | None
    lemma4: bool
    basic_lemma: bool | None
    representation: str | None
    weights: list[list[str]] | None
    timings: dict[str, float] = field(default_factory=dict, compare=False)

    @property
    def averaging_consistent(self) -> bool:
        return self.feasible == self.feasible_adh

    def summary_line(self) -> str:
        status = "FEASIBLE" if self.feasible else "INFEASIBLE"
        dim = self.solution_dim if self.feasible else "-"
        return f"{self.algebra} {self.orbit} {status} dim(M)={dim}"

    def to_json_dict(self) -> dict:
        return {
            "algebra": self.algebra,
            "orbit": self.orbit,
            "dims": self.dims,
            "weighted_dynkin": self.weighted_dynkin,
            "feasible": self.feasible,
            "expected": self.expected,
            "solution_dim": self.solution_dim,
            "feasible_adh": self.feasible_adh,
            "solution_dim_adh": self.solution_dim_adh,
            "lemma4": self.lemma4,
            "basic_lemma": self.basic_lemma,
            "representation": self.representation,
            "weights": self.weights,
        }


@dataclass
class TheoremTable:
    rows: list[TheoremRow]
    max_rank: int

    @property
    def agreement(self) -> bool:
        return all(r.feasible == r.expected for r in self.rows)

    def to_json_dict(self) -> dict:
        return {
            "max_rank": self.max_rank,
            "agreement": self.agreement,
            "rows": [r.to_json_dict() for r in self.rows],
        }


def supported_algebras(max_rank: int) -> list[str]:
    out = []
    for rank in range(1, max_rank + 1):
        for letter in "ABCDG":
            if rank in SUPPORTED[letter]:
                out.append(f"{letter}{rank}")
    return out


def theorem_row(ctx: OrbitContext) -> TheoremRow:
    L = ctx.algebra
    rep_plain, _ = analyze(ctx, {I, IIP}, checks=False)
    rep_adh, _ = analyze(ctx, {I, IIP, ADH}, checks=True)
    try:
        l4 = lemma4_triple(ctx).holds()
    except NoFSolution:
        l4 = False
    basic = None
    if rep_adh.feasible:
        basic = bool(rep_adh.sample_points_flat and rep_adh.checks["witness_is_fbar"])
    timings = {f"plain_{k}": v for k, v in rep_plain.timings.items()}
    timings.update({f"adh_{k}": v for k, v in rep_adh.timings.items()})
    return TheoremRow(
        algebra=L.name,
        orbit=ctx.label,
        dims=rep_plain.dims,
        weighted_dynkin=rep_plain.weighted_dynkin,
        feasible=rep_plain.feasible,
        expected=expected_feasible(L.root_system.type_letter, L.rank, ctx.label),
        solution_dim=rep_plain.solution_dim,
        feasible_adh=rep_adh.feasible,
        solution_dim_adh=rep_adh.solution_dim,
        lemma4=l4,
        basic_lemma=basic,
        representation=rep_adh.representation,
        weights=rep_adh.weights,
        timings=timings,
    )


def run_theorem(max_rank: int, on_row=None) -> TheoremTable:
    """Sweep minimal and regular orbits of every supported algebra up to
    ``max_rank``; rows come out in a fixed order."""
    if not 1 <= max_rank <= 4:
        raise ValueError("max rank must be between 1 and 4")
    rows = []
    for name in supported_algebras(max_rank):
        L = build_algebra(name[0], int(name[1:]))
        for ctx in orbit_catalog(L):
            row = theorem_row(ctx)
            rows.append(row)
            if on_row is not None:
                on_row(row)
    return TheoremTable(rows, max_rank)
