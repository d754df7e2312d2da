import itertools

import numpy as np
import pytest

from localcut import graph as gr
from localcut import oracles
from localcut.graph import conductance


def test_profile_examples():
    p = oracles.exact_expansion_profile(gr.cycle(8), 6)
    assert p.phi == pytest.approx(1 / 3) and p.members.size == 3
    p = oracles.exact_expansion_profile(gr.dumbbell(3), 7)
    assert p.members.tolist() == [0, 1, 2] and p.phi == pytest.approx(1 / 7)
    g = gr.complete(4)
    p = oracles.exact_expansion_profile(g, g.total_volume)
    assert p.phi == 0 and p.members.size == 4


def test_min_conductance_examples():
    c4 = oracles.exact_min_conductance(gr.cycle(4))
    # opposite vertices {0, 2} have conductance 1; the adjacent pair wins
    assert c4.phi == 0.5 and c4.members.tolist() == [0, 1]
    k4 = oracles.exact_min_conductance(gr.complete(4))
    assert k4.phi == pytest.approx(2 / 3) and k4.volume == 6
    assert oracles.exact_min_conductance(gr.disjoint_cliques(2, 3)).phi == 0


def test_subset_tables_match_direct_conductance():
    g = gr.ring_of_cliques(3, 3, bridge_weight=0.7)
    vol, phi = oracles.all_set_conductances(g)
    for mask in range(1, 1 << g.n):
        members = [i for i in range(g.n) if mask >> i & 1]
        v, _, ph = conductance(g, members)
        assert vol[mask - 1] == pytest.approx(v)
        assert phi[mask - 1] == pytest.approx(ph, abs=1e-12)


def test_enumeration_guard():
    with pytest.raises(ValueError):
        oracles.exact_min_conductance(gr.cycle(oracles.ENUMERATION_LIMIT + 1))
    with pytest.raises(ValueError):
        oracles.exact_expansion_profile(gr.cycle(4), 1)


def test_inertia_count_matches_eigvalsh():
    rng = np.random.default_rng(4)
    m = rng.normal(size=(12, 12))
    m = m + m.T
    eigs = np.sort(np.linalg.eigvalsh(m))
    for lo, hi in itertools.pairwise(eigs):
        theta = (lo + hi) / 2
        assert oracles.count_eigenvalues_above(m, theta) == int(np.sum(eigs > theta))
