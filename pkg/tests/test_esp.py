import math

import numpy as np
import pytest

from localcut import esp
from localcut import graph as gr
from localcut.graph import conductance


def _kernel(g, s):
    return {tuple(t.tolist()): p for t, p in esp.esp_kernel(g, s)}


def test_retention_examples(c4, k2):
    assert esp.retention(c4, [0, 1]).as_dict() == {0: 0.75, 1: 0.75, 2: 0.25, 3: 0.25}
    assert esp.retention(k2, [0]).as_dict() == {0: 0.5, 1: 0.5}
    prof = esp.retention(c4, [0])
    assert [prof.value(y) for y in range(4)] == [0.5, 0.25, 0.0, 0.25]


def test_esp_step_examples(c4):
    prof = esp.retention(c4, [0, 1])
    assert esp.esp_step(prof, 0.5).tolist() == [0, 1]
    assert esp.esp_step(prof, 0.2).tolist() == [0, 1, 2, 3]
    assert esp.esp_step(prof, 0.8).tolist() == []
    with pytest.raises(ValueError):
        esp.esp_step(prof, 1.5)


def test_kernel_examples(c4, k2):
    assert _kernel(c4, [0, 1]) == {(0, 1, 2, 3): 0.25, (0, 1): 0.5, (): 0.25}
    assert _kernel(k2, [0]) == {(0, 1): 0.5, (): 0.5}
    assert _kernel(c4, [0]) == {(0, 1, 3): 0.25, (0,): 0.25, (): 0.5}
    first, *_, last = esp.esp_kernel(c4, [0, 1])
    assert first[0].size == 4 and last[0].size == 0


def test_absorbing_states(c4):
    assert _kernel(c4, []) == {(): 1.0}
    assert _kernel(c4, range(4)) == {(0, 1, 2, 3): 1.0}


def test_volume_biased_kernel(c4):
    k = {tuple(t.tolist()): p for t, p in esp.volume_biased_kernel(c4, [0, 1])}
    assert k == {(0, 1, 2, 3): 0.5, (0, 1): 0.5}
    assert sum(k.values()) == pytest.approx(1)


def test_growth_gauge_examples(c4, k2):
    assert esp.growth_gauge(k2, [0]) == pytest.approx(1 - math.sqrt(2) / 2)
    psi = esp.growth_gauge(c4, [0, 1])
    assert psi == pytest.approx(1 - (math.sqrt(2) / 4 + 0.5))
    assert psi >= conductance(c4, [0, 1])[2] ** 2 / 8
    assert esp.growth_gauge(c4, [0]) == pytest.approx(1 - (math.sqrt(3) / 4 + 0.25))


def test_vb_step_forced_outcome(k2):
    rng = np.random.default_rng(0)
    for _ in range(100):
        s, x = esp.vb_step(k2, [0], 0, rng)
        assert s.tolist() == [0, 1] and x in (0, 1)


def test_vb_step_frequency_on_c4(c4):
    rng = np.random.default_rng(5)
    hits = 0
    for i in range(20_000):
        x = (0, 1)[i % 2]
        s, xn = esp.vb_step(c4, [0, 1], x, rng)
        assert xn in s
        hits += s.size == 4
    assert hits / 20_000 == pytest.approx(0.5, abs=0.015)


def test_vb_step_requires_walker_in_set(c4):
    with pytest.raises(ValueError):
        esp.vb_step(c4, [0, 1], 2, np.random.default_rng(0))


def test_martingale_after_one_step(c4):
    psi = esp.growth_gauge(c4, [0])
    assert math.sqrt(2 / 6) / (1 - psi) == pytest.approx(0.845299, abs=1e-6)
    total = sum(p * math.sqrt(2 / c4.volume(t)) / (1 - psi) for t, p in esp.volume_biased_kernel(c4, [0]))
    assert total == pytest.approx(1.0, abs=1e-9)
    # find a sampled path that took {0} -> {0, 1, 3}
    for seed in range(50):
        path = esp.run_vb_esp(c4, 0, 1, np.random.default_rng(seed))
        if path.sets[1].tolist() == [0, 1, 3]:
            assert path.martingale[1] == pytest.approx(0.845299, abs=1e-6)
            break
    else:
        pytest.fail("no path reached {0, 1, 3}")


def test_sample_path_bookkeeping(db5):
    path = esp.run_vb_esp(db5, 0, 15, np.random.default_rng(2))
    for t, s in enumerate(path.sets):
        vol, _, phi = conductance(db5, s)
        assert path.volumes[t] == vol and path.phis[t] == pytest.approx(phi)
        assert path.walker[t] in s
    assert all(b >= a for a, b in zip(path.work, path.work[1:]))
    js = path.to_json(db5)
    assert js["steps"] == path.steps and len(js["trace"]) == path.steps + 1


def test_stop_rule_on_dumbbell():
    g = gr.dumbbell(10)
    fired = 0
    for seed in range(200):
        path = esp.run_vb_esp(g, 0, 200, np.random.default_rng(seed), stop=lambda s, v, phi: phi <= 0.05, track_gauge=False)
        if path.outcome == "stopped":
            fired += 1
            assert path.phis[-1] <= 0.05
    assert fired >= 60


def test_absorption_ends_run(k2):
    path = esp.run_vb_esp(k2, 0, 10, np.random.default_rng(0))
    assert path.outcome == "absorbed" and path.steps == 1


def test_config_defaults():
    cfg = esp.ParEspConfig(gamma=381, phi=1 / 381, eps=0.5, seed=1)
    assert cfg.copies == math.ceil(381**0.25)
    assert cfg.horizon == math.ceil(0.5 * math.log(381) / (6 / 381))
    assert cfg.stop_volume == pytest.approx(2 * 381**1.25 * 200)
    assert cfg.stop_phi == pytest.approx(math.sqrt(200 * (1 + math.log(200)) / 381 / 0.5))
    big = esp.ParEspConfig(gamma=1e12, phi=0.1, eps=0.9, seed=1)
    assert big.copies == 64 and big.copies_capped
    with pytest.raises(ValueError):
        esp.ParEspConfig(gamma=10, phi=0, eps=0.5, seed=1)


def test_par_esp_finds_component():
    g = gr.disjoint_cliques(2, 4)
    for seed in range(20):
        cfg = esp.ParEspConfig(gamma=12, phi=0.01, eps=0.5, seed=seed, stop_phi=0.0, stop_volume=24)
        out = esp.par_esp(g, 1, cfg)
        assert out.found and out.result.members.tolist() == [0, 1, 2, 3] and out.result.phi == 0


def test_par_esp_determinism():
    g = gr.dumbbell(8)
    cfg = esp.ParEspConfig(gamma=57, phi=1 / 57, eps=0.5, seed=123, stop_phi=0.1, stop_volume=114)
    a, b = esp.par_esp(g, 0, cfg), esp.par_esp(g, 0, cfg)
    assert a.to_json(g) == b.to_json(g)


def test_par_esp_reports_absence():
    g = gr.cycle(6)
    cfg = esp.ParEspConfig(gamma=4, phi=0.1, eps=0.5, seed=0, stop_phi=1e-6, stop_volume=4)
    out = esp.par_esp(g, 0, cfg)
    assert not out.found and out.to_json(g)["found"] is False


def test_batch_step_frequencies(c4):
    rng = np.random.default_rng(9)
    s = [0, 1]
    xs = rng.choice(s, size=50_000)
    prof, u, x_next = esp.vb_step_batch(c4, s, xs, rng)
    sizes = (prof.q[None, :] >= u[:, None]).sum(axis=1)
    assert np.mean(sizes == 4) == pytest.approx(0.5, abs=0.01)
    assert np.all(u <= esp.retention(c4, s).q.max())
    # the walker always lands inside its new set
    assert all(x in prof.vertices[prof.q >= t] for t, x in zip(u[:200], x_next[:200]))
    with pytest.raises(ValueError):
        esp.vb_step_batch(c4, s, np.array([2]), rng)
