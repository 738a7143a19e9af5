"""Exact invariant-connection analysis for nilpotent orbits of simple Lie algebras."""

from .connection import ADH, I, IIP, assemble, parse_conditions, solve_connection_space
from .exact_linalg import Infeasible, MatrixQ, backend, nullspace, rank, solve_affine, use_backend
from .flatness import run_checks
from .lie_core import build_algebra, parse_algebra_name, verify_jacobi
from .orbits import build_context, orbit_catalog
from .report import analyze, read_report, run_theorem, write_report

__version__ = "0.1.0"

__all__ = [
    "ADH",
    "I",
    "IIP",
    "Infeasible",
    "MatrixQ",
    "analyze",
    "assemble",
    "backend",
    "build_algebra",
    "build_context",
    "nullspace",
    "orbit_catalog",
    "parse_algebra_name",
    "parse_conditions",
    "rank",
    "read_report",
    "run_checks",
    "run_theorem",
    "solve_affine",
    "solve_connection_space",
    "use_backend",
    "verify_jacobi",
    "write_report",
]
