from fractions import Fraction

import numpy as np
import pytest

from orbitconn.connection import ADH, I, IIP, GammaTensor, assemble, solve_connection_space
from orbitconn.flatness import (
    check_hrep,
    curvature,
    curvature_vanishes,
    identify_representation,
    is_representation,
    is_transitive,
    lemma4_triple,
    match_named_representation,
    run_checks,
    torsion,
    torsion_vanishes,
    weights_to_eps,
)
from orbitconn.lie_core import build_algebra
from orbitconn.orbits import induced_operator, orbit_catalog

F = Fraction


def ctx_of(name, label="minimal"):
    L = build_algebra(name[0], int(name[1:]))
    return next(c for c in orbit_catalog(L) if c.label == label)


def flat(name):
    ctx = ctx_of(name)
    return ctx, solve_connection_space(assemble(ctx, {I, IIP, ADH}), ctx)


def _zero(M):
    return not any(x != 0 for x in np.asarray(M).flat)


def test_curvature_torsion_diagonal_zero():
    ctx, space = flat("C2")
    g = space.particular
    L = ctx.algebra
    for i in range(L.dim):
        x = L.basis_element(i)
        assert _zero(curvature(g, x, x))
        assert _zero(torsion(g, x, x))


def test_curvature_on_isotropy_vanishes_for_iip_solutions():
    ctx = ctx_of("C2")
    space = solve_connection_space(assemble(ctx, {I, IIP}), ctx)
    L = ctx.algebra
    for p in space.sample_points():
        for z in ctx.centralizer_basis:
            for j in range(L.dim):
                assert _zero(curvature(p, z, L.basis_element(j)))


def test_a1_flat_solution():
    ctx, space = flat("A1")
    g = space.particular
    L = ctx.algebra
    assert _zero(curvature(g, L.f((1,)), L.e((1,))))
    assert curvature_vanishes(g) and torsion_vanishes(g)
    ok, w = is_transitive(g)
    assert ok and list(w) == list(ctx.coset(ctx.triple.f))
    assert check_hrep(g)


def test_lift_independence():
    ctx, space = flat("C2")
    g = space.particular
    L = ctx.algebra
    for i, j in [(0, 5), (3, 7), (8, 9), (1, 2)]:
        xi, eta = L.basis_element(i), L.basis_element(j)
        for z in ctx.centralizer_basis:
            assert np.all(torsion(g, xi + z, eta) == torsion(g, xi, eta))
            assert np.all(torsion(g, xi, eta + z) == torsion(g, xi, eta))


def test_representation_iff_curvature_zero():
    for name in ("A1", "C2"):
        ctx = ctx_of(name)
        space = solve_connection_space(assemble(ctx, {I, IIP}), ctx)
        for p in space.sample_points():
            assert is_representation(p) == curvature_vanishes(p)


def test_zero_slices_not_representation():
    ctx = ctx_of("A1")
    n = ctx.dim_m
    entries = np.empty((ctx.dim_g, n, n), dtype=object)
    for b in range(ctx.dim_g):
        entries[b] = np.full((n, n), F(0), dtype=object)
    # inject condition I on the isotropy algebra, zero on the complement
    for b, (hc, _) in enumerate(ctx.basis_decomposition):
        for i, c in hc.items():
            entries[b] = entries[b] + c * ctx.centralizer_operators[i]
    g = GammaTensor(entries, ctx)
    assert not is_representation(g)
    L = ctx.algebra
    # Γ_f = Γ_h = 0 here, so (f, e) gives Γ_{-h} = 0; the failure shows on (h, e)
    assert _zero(curvature(g, L.f((1,)), L.e((1,))))
    assert not _zero(curvature(g, L.h(0), L.e((1,))))


def test_transitive_requires_representation():
    ctx = ctx_of("C2")
    space = solve_connection_space(assemble(ctx, {I, IIP}), ctx)
    nonrep = next(p for p in space.sample_points() if not is_representation(p))
    with pytest.raises(ValueError):
        is_transitive(nonrep)


def test_non_transitive_fixture():
    # a representation of sl2 on C^2 ⊕ C (trivial summand) viewed on a
    # 3-dim space: built on top of the A1 context by widening the slices
    ctx, space = flat("A1")
    g = space.particular
    n = ctx.dim_m
    wide = np.empty((ctx.dim_g, n + 1, n + 1), dtype=object)
    for b in range(ctx.dim_g):
        M = np.full((n + 1, n + 1), F(0), dtype=object)
        M[:n, :n] = g.slice(b)
        wide[b] = M

    class _Ctx:
        pass

    fake = _Ctx()
    fake.algebra = ctx.algebra
    fake.dim_m = n + 1
    fake.dim_g = ctx.dim_g
    fake.triple = ctx.triple
    fake.coset = lambda x: np.array(list(ctx.coset(x)) + [F(0)], dtype=object)
    G = GammaTensor(wide, fake)
    assert is_representation(G)
    ok, w = is_transitive(G)
    assert not ok and w is None


@pytest.mark.parametrize("name", ["A1", "B2", "C2"])
def test_hrep_and_torsion_instance(name):
    ctx, space = flat(name)
    g = space.particular
    L = ctx.algebra
    h = ctx.triple.h
    hbar = ctx.coset(h)
    for b in range(ctx.dim_g):
        xi = L.basis_element(b)
        # σ(ξ̄, h̄) = Γ_ξ h̄ − Γ_h ξ̄ − [ξ,h]̄
        direct = g.of(xi).dot(hbar) - g.of(h).dot(ctx.coset(xi)) - ctx.coset(L.bracket(xi, h))
        assert np.all(torsion(g, xi, h) == direct)
        assert not any(direct)
    for z in ctx.centralizer_basis:
        assert not any(g.of(z).dot(hbar))


def test_lemma4_a1():
    ctx = ctx_of("A1")
    t = lemma4_triple(ctx)
    assert t.holds()
    H = t.H_op
    assert sorted(H[i, i] for i in range(ctx.dim_m)) == [-1, 1]
    E = t.E_op
    P = np.identity(ctx.dim_m, dtype=object)
    for _ in range(ctx.dim_m + 1):
        P = P.dot(E)
    assert _zero(P)
    adh = induced_operator(ctx, ctx.triple.h)
    assert sum(H[i, i] for i in range(ctx.dim_m)) == sum(adh[i, i] for i in range(ctx.dim_m)) + ctx.dim_m


@pytest.mark.parametrize("name,label", [("A2", "minimal"), ("A2", "regular"), ("C2", "regular"), ("G2", "minimal"), ("G2", "regular")])
def test_lemma4_unconditional(name, label):
    assert lemma4_triple(ctx_of(name, label)).holds()


def test_weights():
    ctx, space = flat("A1")
    assert identify_representation(space.particular) == [(1,), (-1,)]
    ctx, space = flat("C2")
    labels = identify_representation(space.particular)
    assert len(labels) == ctx.dim_m
    eps = {weights_to_eps(ctx.algebra.root_system, w) for w in labels}
    assert eps == {(1, 0), (-1, 0), (0, 1), (0, -1)}
    assert match_named_representation(ctx.algebra.root_system, list(eps)) == "R(pi_1)"


def test_checks_report_c2():
    ctx, space = flat("C2")
    rep = run_checks(space.particular)
    assert rep.all_true()
    assert rep.witness_is_fbar
    d = rep.as_dict()
    assert list(d)[:6] == ["curvature_zero", "torsion_zero", "is_representation", "is_transitive", "hrep_holds", "lemma4_holds"]
