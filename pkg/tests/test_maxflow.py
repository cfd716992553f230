import itertools
from fractions import Fraction

import pytest

from conftest import as_raw, rand_submodular_pair
import naive
from perivar import (
    CellSet,
    Face,
    FlowNetwork,
    FullSpace,
    GridDomain,
    MeasureData,
    NonSubmodularError,
    SignedPair,
    add_volume_term,
    assemble,
    max_flow,
    minimize,
    parametric_sweep,
)
from perivar.maxflow import cut_capacity

F = Fraction


def test_max_flow_diamond():
    net = FlowNetwork()
    a, b = net.add_node(), net.add_node()
    net.add_arc(net.source, a, 3)
    net.add_arc(net.source, b, 2)
    net.add_arc(a, b, 1)
    net.add_arc(a, net.sink, 2)
    net.add_arc(b, net.sink, 3)
    result = max_flow(net)
    assert result.value == 5
    assert net.source in result.source_side
    assert net.sink not in result.source_side


def test_max_flow_equals_min_cut_enumerated(rng):
    for _ in range(30):
        net = FlowNetwork()
        nodes = [net.add_node() for _ in range(4)]
        everyone = [net.source, net.sink] + nodes
        for u in everyone:
            for v in everyone:
                if u != v and rng.random() < 0.4:
                    net.add_arc(u, v, rng.randint(0, 6))
        caps = net.snapshot()
        result = max_flow(net, caps)
        # enumerate all s-t cuts
        best = min(
            cut_capacity(
                net, frozenset({net.source}) | frozenset(side), caps
            )
            for r in range(len(nodes) + 1)
            for side in itertools.combinations(nodes, r)
        )
        assert result.value == best
        assert cut_capacity(net, result.source_side, caps) == result.value


def test_minimize_matches_exhaustive(rng):
    for _ in range(40):
        d = GridDomain(rng.choice([(3, 3), (4, 2), (2, 2, 2), (6,)]))
        pair = rand_submodular_pair(rng, d)
        energy = assemble(pair, FullSpace())
        sol, val = minimize(energy)
        pf, pc = as_raw(pair.plus)
        mf, mc = as_raw(pair.minus)
        best, argmins = naive.minimize_over(
            d.dims, d.cells(), frozenset(), pf, pc, mf, mc
        )
        assert val == best
        assert sol.cells in argmins


def test_minimize_returns_canonical_minimal_argmin(rng):
    # the returned minimizer is the intersection of all optimal sets
    for _ in range(25):
        d = GridDomain(rng.choice([(3, 3), (4, 2)]))
        pair = rand_submodular_pair(rng, d)
        energy = assemble(pair, FullSpace())
        sol, val = minimize(energy)
        pf, pc = as_raw(pair.plus)
        mf, mc = as_raw(pair.minus)
        _, argmins = naive.minimize_over(
            d.dims, d.cells(), frozenset(), pf, pc, mf, mc
        )
        assert sol.cells == frozenset.intersection(*argmins)


def test_minimize_rejects_non_submodular():
    d = GridDomain((3, 3))
    f = Face(0, 1, (1,))
    pair = SignedPair(
        MeasureData(d, face_weights={f: F(2)}),
        MeasureData(d, face_weights={f: F(2)}),
    )
    with pytest.raises(NonSubmodularError) as exc:
        minimize(assemble(pair, FullSpace()))
    assert exc.value.report.violations


def test_parametric_sweep_nested_and_exact(rng):
    for _ in range(10):
        d = GridDomain((3, 3))
        pair = rand_submodular_pair(rng, d)
        energy = assemble(pair, FullSpace())
        pieces = parametric_sweep(energy, F(-4), F(4))
        assert pieces[0].volume >= pieces[-1].volume
        for a, b in zip(pieces, pieces[1:]):
            assert a.lam_hi == b.lam_lo
            assert b.minimizer.issubset(a.minimizer)
            assert a.volume > b.volume
        for piece in pieces:
            lam = (piece.lam_lo + piece.lam_hi) / 2
            sol, val = minimize(add_volume_term(energy, lam))
            assert val == piece.value + lam * piece.volume
