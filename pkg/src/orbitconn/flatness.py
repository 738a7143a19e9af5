"""Geometric checks on a solved connection map ``Γ``.

Curvature and torsion at the base point::

    ρ(ξ̄, η̄) = Γ_[ξ,η] - [Γ_ξ, Γ_η]
    σ(ξ̄, η̄) = Γ_ξ η̄ - Γ_η ξ̄ - [ξ, η]̄

A connection is locally flat iff ``Γ`` is a representation of ``g`` on
``g/h`` that is transitive (some ``v`` with ``Γ_g v = g/h``).  For a flat
connection normalized along ``h`` the element ``h̄`` satisfies
``Γ_ξ h̄ = ξ̄`` for all ``ξ``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np

from .connection import GammaTensor
from .exact_linalg import MatrixQ, rank, solve_affine
from .lie_core import LieAlgebra, RootSystem
from .orbits import OrbitContext, induced_operator

__all__ = [
    "CheckReport",
    "EndoTriple",
    "NoFSolution",
    "NonIntegralWeights",
    "STANDARD_WEIGHTS",
    "check_hrep",
    "curvature",
    "identify_representation",
    "is_representation",
    "is_transitive",
    "lemma4_triple",
    "match_named_representation",
    "run_checks",
    "torsion",
    "weights_to_eps",
]

WITNESS_SEED = 0
WITNESS_TRIES = 16


class NoFSolution(RuntimeError):
    """No operator completes ``(ad e, ad h + Id)`` to an sl2-triple."""


class NonIntegralWeights(ArithmeticError):
    pass


def _comm(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return A.dot(B) - B.dot(A)


def _zero(M: np.ndarray) -> bool:
    return not any(x != 0 for x in M.flat)


def _identity(n: int) -> np.ndarray:
    M = np.full((n, n), Fraction(0), dtype=object)
    for i in range(n):
        M[i, i] = Fraction(1)
    return M


def curvature(gamma: GammaTensor, xi, eta) -> np.ndarray:
    L = gamma.ctx.algebra
    return gamma.of(L.bracket(xi, eta)) - _comm(gamma.of(xi), gamma.of(eta))


def torsion(gamma: GammaTensor, xi, eta) -> np.ndarray:
    ctx = gamma.ctx
    return (
        gamma.of(xi).dot(ctx.coset(eta))
        - gamma.of(eta).dot(ctx.coset(xi))
        - ctx.coset(ctx.algebra.bracket(xi, eta))
    )


def _basis_pairs(L: LieAlgebra):
    return product(range(L.dim), repeat=2)


def curvature_vanishes(gamma: GammaTensor) -> bool:
    L = gamma.ctx.algebra
    return all(_zero(curvature(gamma, L.basis_element(i), L.basis_element(j))) for i, j in _basis_pairs(L))


def torsion_vanishes(gamma: GammaTensor) -> bool:
    L = gamma.ctx.algebra
    return all(_zero(torsion(gamma, L.basis_element(i), L.basis_element(j))) for i, j in _basis_pairs(L))


@dataclass(frozen=True, eq=False)
class EndoTriple:
    """sl2-triple of operators on ``g/h``: ``E = ad e``, ``H = ad h + Id``."""

    F_op: np.ndarray
    H_op: np.ndarray
    E_op: np.ndarray

    def holds(self) -> bool:
        F, H, E = self.F_op, self.H_op, self.E_op
        return _zero(_comm(H, E) - 2 * E) and _zero(_comm(H, F) + 2 * F) and _zero(_comm(E, F) - H)


def lemma4_triple(ctx: OrbitContext) -> EndoTriple:
    """Build ``E``, ``H`` on ``g/h`` and solve ``[E,F] = H``, ``[H,F] = -2F``."""
    n = ctx.dim_m
    E = induced_operator(ctx, ctx.triple.e)
    H = induced_operator(ctx, ctx.triple.h) + _identity(n)
    rows: list[dict[int, Fraction]] = []
    rhs: list[Fraction] = []
    # unknown F[k, c] at index k*n + c
    for r in range(n):
        for c in range(n):
            ef: dict[int, Fraction] = {}
            hf: dict[int, Fraction] = {r * n + c: Fraction(2)}
            for k in range(n):
                if E[r, k]:
                    ef[k * n + c] = ef.get(k * n + c, 0) + E[r, k]
                if E[k, c]:
                    ef[r * n + k] = ef.get(r * n + k, 0) - E[k, c]
                if H[r, k]:
                    hf[k * n + c] = hf.get(k * n + c, 0) + H[r, k]
                if H[k, c]:
                    hf[r * n + k] = hf.get(r * n + k, 0) - H[k, c]
            rows.append(ef)
            rhs.append(H[r, c])
            rows.append(hf)
            rhs.append(Fraction(0))
    sol = solve_affine(MatrixQ(len(rows), n * n, rows), rhs)
    if not sol.feasible:
        raise NoFSolution("no F completes the triple on g/h")
    F = np.array(list(sol.particular), dtype=object).reshape(n, n)
    triple = EndoTriple(F, H, E)
    if not triple.holds():
        raise NoFSolution("triple relations fail on g/h")
    return triple


def is_representation(gamma: GammaTensor) -> bool:
    """``Γ_[ξ,η] = [Γ_ξ, Γ_η]`` on all ordered basis pairs."""
    L = gamma.ctx.algebra
    S = gamma.entries
    for i, j in _basis_pairs(L):
        lhs = gamma.of(L.bracket(L.basis_element(i), L.basis_element(j)))
        if not _zero(lhs - _comm(S[i], S[j])):
            return False
    return True


def _spans(gamma: GammaTensor, v: np.ndarray) -> bool:
    n = gamma.ctx.dim_m
    cols = [gamma.slice(b).dot(v) for b in range(gamma.ctx.dim_g)]
    M = MatrixQ(len(cols), n, [{k: x for k, x in enumerate(col) if x} for col in cols])
    return rank(M) == n


def is_transitive(gamma: GammaTensor) -> tuple[bool, np.ndarray | None]:
    """Search for ``v`` with ``Γ_g v = g/h``: ``f̄`` first, then seeded
    random small-integer vectors."""
    if not is_representation(gamma):
        raise ValueError("transitivity is defined for representations only")
    ctx = gamma.ctx
    fbar = ctx.coset(ctx.triple.f)
    if any(fbar) and _spans(gamma, fbar):
        return True, fbar
    rng = random.Random(WITNESS_SEED)
    for _ in range(WITNESS_TRIES):
        v = np.array([Fraction(rng.randint(-3, 3)) for _ in range(ctx.dim_m)], dtype=object)
        if any(v) and _spans(gamma, v):
            return True, v
    return False, None


def check_hrep(gamma: GammaTensor) -> bool:
    """``Γ_b h̄ = b̄`` for every basis vector ``b``."""
    ctx = gamma.ctx
    hbar = ctx.coset(ctx.triple.h)
    L = ctx.algebra
    return all(
        _zero(gamma.slice(b).dot(hbar) - ctx.coset(L.basis_element(b))) for b in range(ctx.dim_g)
    )


def _kernel_basis(M: np.ndarray) -> list[np.ndarray]:
    rows = [{j: x for j, x in enumerate(M[i]) if x} for i in range(M.shape[0])]
    sol = solve_affine(MatrixQ(M.shape[0], M.shape[1], rows), [0] * M.shape[0])
    return [np.array(v, dtype=object) for v in sol.nullspace_basis]


def identify_representation(gamma: GammaTensor) -> list[tuple[int, ...]]:
    """Joint integer eigenvalues of ``Γ_{h_1}, ..., Γ_{h_l}`` with multiplicity.

    Each tuple lists the values on the simple coroots (Dynkin labels of the
    weight).  Sorted descending.
    """
    ctx = gamma.ctx
    n = ctx.dim_m
    groups: list[tuple[tuple[int, ...], np.ndarray]] = [((), _identity(n))]
    for i in range(ctx.algebra.rank):
        G = gamma.slice(i)
        bound = int(max(sum(abs(x) for x in G[r]) for r in range(n))) if n else 0
        nxt = []
        for prefix, W in groups:
            found = 0
            GW = G.dot(W)
            for c in range(-bound, bound + 1):
                ker = _kernel_basis(GW - c * W)
                if ker:
                    nxt.append((prefix + (c,), np.column_stack([W.dot(y) for y in ker])))
                    found += len(ker)
            if found != W.shape[1]:
                raise NonIntegralWeights("Cartan operators are not simultaneously diagonalizable over Z")
        groups = nxt
    out = []
    for labels, W in groups:
        out.extend([labels] * W.shape[1])
    return sorted(out, reverse=True)


def weights_to_eps(rs: RootSystem, labels: tuple[int, ...]) -> tuple[Fraction, ...]:
    """Convert Dynkin labels to ε-coordinates."""
    # λ = Σ c_k α_k with Σ_k cartan[j][k] c_k = labels_j
    A = MatrixQ.from_dense(rs.cartan_matrix)
    sol = solve_affine(A, list(labels))
    return tuple(Fraction(x) for x in rs.eps(sol.particular))


def _pm_units(l: int) -> frozenset:
    out = set()
    for i in range(l):
        for s in (1, -1):
            v = [Fraction(0)] * l
            v[i] = Fraction(s)
            out.add(tuple(v))
    return frozenset(out)


# Weight sets (ε-coordinates) of representations identified by name.
STANDARD_WEIGHTS: dict[tuple[str, int], tuple[str, frozenset]] = {
    ("A", 1): ("R(pi_1)", frozenset({(Fraction(1, 2), Fraction(-1, 2)), (Fraction(-1, 2), Fraction(1, 2))})),
    ("B", 2): (
        "R(pi_2)",
        frozenset((Fraction(a, 2), Fraction(b, 2)) for a in (1, -1) for b in (1, -1)),
    ),
    **{("C", l): ("R(pi_1)", _pm_units(l)) for l in (2, 3, 4)},
}


def match_named_representation(rs: RootSystem, eps_weights: list[tuple[Fraction, ...]]) -> str | None:
    """Name of the tabulated representation with exactly these weights (each
    of multiplicity one), else ``None``."""
    entry = STANDARD_WEIGHTS.get((rs.type_letter, rs.rank))
    if entry is None:
        return None
    name, table = entry
    if len(eps_weights) == len(table) and set(eps_weights) == table:
        return name
    return None


@dataclass(frozen=True, eq=False)
class CheckReport:
    curvature_zero: bool
    torsion_zero: bool
    is_representation: bool
    is_transitive: bool
    hrep_holds: bool
    lemma4_holds: bool
    witness: np.ndarray | None = None
    witness_is_fbar: bool = False

    def all_true(self) -> bool:
        return all(
            (
                self.curvature_zero,
                self.torsion_zero,
                self.is_representation,
                self.is_transitive,
                self.hrep_holds,
                self.lemma4_holds,
            )
        )

    def as_dict(self) -> dict:
        return {
            "curvature_zero": self.curvature_zero,
            "torsion_zero": self.torsion_zero,
            "is_representation": self.is_representation,
            "is_transitive": self.is_transitive,
            "hrep_holds": self.hrep_holds,
            "lemma4_holds": self.lemma4_holds,
            "witness": None if self.witness is None else [str(x) for x in self.witness],
            "witness_is_fbar": self.witness_is_fbar,
        }


def run_checks(gamma: GammaTensor) -> CheckReport:
    ctx = gamma.ctx
    rep = is_representation(gamma)
    if rep:
        trans, witness = is_transitive(gamma)
    else:
        trans, witness = False, None
    fbar = ctx.coset(ctx.triple.f)
    try:
        l4 = lemma4_triple(ctx).holds()
    except NoFSolution:
        l4 = False
    return CheckReport(
        curvature_zero=curvature_vanishes(gamma),
        torsion_zero=torsion_vanishes(gamma),
        is_representation=rep,
        is_transitive=trans,
        hrep_holds=check_hrep(gamma),
        lemma4_holds=l4,
        witness=witness,
        witness_is_fbar=witness is not None and bool(np.all(witness == fbar)),
    )
