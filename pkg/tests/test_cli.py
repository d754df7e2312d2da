import json

import pytest

from localcut.cli import run


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert run(["gen", "dumbbell", "--k", "5", "-o", "g.el"]) == 0
    assert run(["gen", "cycle", "--n", "4", "-o", "c4.el"]) == 0
    return tmp_path


def _json(argv):
    out = []
    code = run(argv + ["--json"], out=out.append)
    return code, json.loads(out[0]) if out else None


def test_gen_writes_canonical_edge_list(workdir):
    text = (workdir / "g.el").read_text()
    assert text.splitlines()[0] == "0 1" and len(text.splitlines()) == 21


def test_profile(workdir):
    code, payload = _json(["profile", "--graph", "g.el", "--phi", "0.1", "--eps", "0.5"])
    assert code == 0 and payload["schema"] == 1 and payload["found"]
    assert payload["result"]["phi"] <= 0.6325 and payload["result"]["volume"] <= 192.4


def test_mixing(workdir):
    code, payload = _json(["mixing", "--graph", "c4.el", "--epsilon", "0.5"])
    assert code == 0 and payload["tau_uniform"] == 2


def test_cluster_is_byte_identical(workdir):
    argv = ["cluster", "--graph", "g.el", "--start", "2", "--gamma", "21", "--phi", "0.05", "--eps", "0.5", "--seed", "7", "--json"]
    a, b = [], []
    run(argv, out=a.append)
    run(argv, out=b.append)
    assert a == b and json.loads(a[0])["schema"] == 1


def test_cluster_requires_seed(workdir):
    assert run(["cluster", "--graph", "g.el", "--start", "2", "--gamma", "21", "--phi", "0.05", "--eps", "0.5"]) == 1


def test_cluster_not_found_is_success(workdir):
    code, payload = _json([
        "cluster", "--graph", "c4.el", "--start", "0", "--gamma", "4", "--phi", "0.1", "--eps", "0.5",
        "--seed", "1", "--stop-phi", "1e-9", "--stop-volume", "4",
    ])
    assert code == 0 and payload["found"] is False


def test_curve_emits_one_line_per_step(workdir):
    out = []
    assert run(["curve", "--graph", "g.el", "--start", "2", "--steps", "10"], out=out.append) == 0
    lines = [json.loads(l) for l in out[0].splitlines()]
    assert [l["t"] for l in lines] == list(range(11))
    assert all(l["y"][-1] == pytest.approx(1) for l in lines)


def test_verify_exit_code(workdir):
    assert run(["verify", "--graph", "g.el", "--suite", "graph", "walks"]) == 0


def test_error_codes(workdir):
    assert run(["profile", "--graph", "missing.el", "--phi", "0.1", "--eps", "0.5"]) == 2
    (workdir / "bad.el").write_text("0 1\n1 1\n")
    assert run(["verify", "--graph", "bad.el"]) == 2
    assert run(["nonsense"]) == 1
    assert run(["profile", "--graph", "g.el", "--phi", "2", "--eps", "0.5"]) == 1


def test_manifest_replay(workdir):
    argv = ["cluster", "--graph", "g.el", "--start", "2", "--gamma", "21", "--phi", "0.05", "--eps", "0.5",
            "--seed", "7", "--stop-phi", "0.1", "--stop-volume", "42", "--manifest", "m.json"]
    assert run(argv, out=lambda s: None) == 0
    manifest = json.loads((workdir / "m.json").read_text())
    assert manifest["seed"] == 7 and len(manifest["graph_digest"]) == 64
    assert manifest["payload"]["found"]
    code, payload = _json(["replay", "m.json"])
    assert code == 0 and payload["identical"]


def test_figures(workdir):
    assert run(["curve", "--graph", "g.el", "--start", "2", "--steps", "5", "--figure", "c.png"], out=lambda s: None) == 0
    argv = ["cluster", "--graph", "g.el", "--start", "0", "--gamma", "21", "--phi", "0.05", "--eps", "0.5",
            "--seed", "3", "--stop-phi", "0.1", "--figure", "p.png", "--trace", "t.jsonl"]
    assert run(argv, out=lambda s: None) == 0
    assert (workdir / "c.png").stat().st_size > 0 and (workdir / "p.png").stat().st_size > 0
    rows = [json.loads(l) for l in (workdir / "t.jsonl").read_text().splitlines()]
    assert rows and all(r["schema"] == 1 for r in rows)
