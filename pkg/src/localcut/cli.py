"""Command-line driver: ``localcut {gen,profile,cluster,curve,mixing,verify,replay}``.

Exit codes: 0 ok, 1 usage, 2 I/O or parse error, 3 verification failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
import warnings
from pathlib import Path

from . import __version__, esp, lscurve, mixing, oracles, verify
from .graph import GENERATORS, Graph, GraphFormatError, components, generate, parse_edge_list, write_edge_list
from .walks import WalkOperator

SCHEMA = 1
EXIT_USAGE, EXIT_IO, EXIT_VERIFY = 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, allow_nan=False)


def _load(path: str) -> Graph:
    return parse_edge_list(Path(path).read_bytes())


def _vertex(g: Graph, label: int) -> int:
    try:
        return g.index_of(label)
    except KeyError as exc:
        raise UsageError(str(exc)) from None


# -- subcommands: each returns (payload, text, exit_code) ---------------------------


def cmd_gen(args):
    params = {"cycle": ("n",), "complete": ("n",), "dumbbell": ("k",), "ring_of_cliques": ("r", "k"),
              "disjoint_cliques": ("r", "k")}[args.kind]
    values = [getattr(args, p) for p in params]
    if any(v is None for v in values):
        raise UsageError(f"gen {args.kind} needs --{' --'.join(params)}")
    kwargs = {"bridge_weight": args.bridge_weight} if args.kind == "ring_of_cliques" else {}
    try:
        g = generate(args.kind, *values, **kwargs)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    text = write_edge_list(g)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    payload = {"kind": args.kind, "n": g.n, "edges": g.edge_count, "volume": g.total_volume, "digest": g.digest()}
    return payload, None if not args.output else f"wrote {args.output}: {g!r}", 0


def cmd_profile(args, g):
    seeds = None if args.seeds is None else [_vertex(g, s) for s in args.seeds]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        try:
            res = lscurve.threshold_algorithm(g, args.phi, args.eps, seeds=seeds, workers=args.threads)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    params = lscurve.ThresholdParams.derive(g, args.phi, args.eps)
    payload = {"found": res is not None, "horizon": params.horizon, "phi_cap": params.phi_cap}
    payload["result"] = None if res is None else res.to_json(g)
    text = "no qualifying threshold set" if res is None else (
        f"set of {res.members.size} vertices, volume {res.volume:g}, phi {res.phi:.6g} (seed {payload['result']['seed']}, t={res.t})"
    )
    return payload, text, 0


def cmd_cluster(args, g):
    v = _vertex(g, args.start)
    try:
        cfg = esp.ParEspConfig(
            gamma=args.gamma, phi=args.phi, eps=args.eps, seed=args.seed, c=args.c, max_copies=args.max_copies,
            stop_phi=args.stop_phi, stop_volume=args.stop_volume, horizon=args.horizon,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    out = esp.par_esp(g, v, cfg, track_gauge=args.trace is not None)
    payload = out.to_json(g)
    payload["config"] = cfg.to_json()
    if args.trace:
        with open(args.trace, "w") as fh:
            for i, path in enumerate(out.paths):
                for rec in path.trace(g):
                    fh.write(_dumps({"schema": SCHEMA, "copy": i, **rec}) + "\n")
    if args.figure:
        from .plotting import plot_sample_path

        idx = out.result.copy if out.found else 0
        plot_sample_path(out.paths[idx], args.figure, stop_phi=cfg.stop_phi, title=f"ParESP copy {idx}")
    if out.found:
        r = out.result
        text = f"set of {r.members.size} vertices, volume {r.volume:g}, phi {r.phi:.6g} (copy {r.copy}, step {r.step}); work {out.total_work:g}"
    else:
        text = f"no qualifying set within {cfg.horizon} steps; work {out.total_work:g}"
    return payload, text, 0


def cmd_curve(args, g):
    v = _vertex(g, args.start)
    op = WalkOperator(g)
    p = op.point_mass(v)
    curves, lines = [], []
    for t in range(args.steps + 1):
        if t:
            p = op.step(p)
        c = lscurve.build_curve(g, p)
        curves.append(c)
        lines.append(_dumps({"schema": SCHEMA, "t": t, "start": args.start, **c.to_json(g)}))
    if args.figure:
        from .plotting import plot_curves

        plot_curves(curves, args.figure, title=f"walk from vertex {args.start}")
    return None, "\n".join(lines), 0


def cmd_mixing(args, g):
    try:
        tu = mixing.uniform_mixing_time(g, args.epsilon, lazy=not args.non_lazy)
        tv = mixing.tv_mixing_time(g, args.epsilon, lazy=not args.non_lazy)
    except mixing.MixingError as exc:
        payload = {"mixes": False, "reason": str(exc), "epsilon": args.epsilon}
        return payload, f"does not mix: {exc}", 0
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    small = g.n <= oracles.ENUMERATION_LIMIT
    lower = None
    if args.gamma is not None:
        phi_gamma = args.phi_gamma
        if phi_gamma is None:
            if not small:
                raise UsageError("--phi-gamma is required when the graph is too large for the exact oracle")
            phi_gamma = oracles.exact_expansion_profile(g, args.gamma).phi
        try:
            lower = mixing.mixing_lower_bound(g.total_volume, args.gamma, phi_gamma)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    js = None
    if small and not args.non_lazy:
        js = mixing.jerrum_sinclair_bound(g, oracles.exact_min_conductance(g).phi, args.epsilon)
    report = mixing.MixingReport(epsilon=args.epsilon, tau_tv=tv, tau_uniform=tu, lower_bound=lower, jerrum_sinclair_upper=js)
    payload = {"mixes": True, **report.to_json()}
    return payload, f"tau_uniform={tu} tau_tv={tv}", 0


def cmd_verify(args, g):
    try:
        checks = verify.run_suites(g, args.suite)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    ok = all(c.passed for c in checks if not c.informational)
    payload = {"passed": ok, "checks": [c.to_json() for c in checks]}
    lines = [f"{'PASS' if c.passed else ('info' if c.informational else 'FAIL')}  [{c.suite}] {c.name}"
             + (f"  ({c.detail})" if c.detail else "") for c in checks]
    return payload, "\n".join(lines), 0 if ok else EXIT_VERIFY


def cmd_replay(args):
    manifest = json.loads(Path(args.manifest_file).read_text())
    buf = []
    code = run(manifest["argv"], out=buf.append)
    replayed = json.loads(buf[0]) if buf else None
    same = replayed is not None and _dumps(replayed) == _dumps(manifest["payload"])
    payload = {"identical": same, "exit_code": code}
    return payload, "payload identical" if same else "payload differs", 0 if same else EXIT_VERIFY


# -- parser ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="localcut", description="Local graph clustering and expansion-profile tools.")
    p.add_argument("--version", action="version", version=f"localcut {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, graph=True):
        if graph:
            sp.add_argument("--graph", required=True, help="edge list file (u v [w] per line)")
        sp.add_argument("--json", action="store_true", help="print the JSON payload")
        sp.add_argument("--manifest", help="write a run manifest to this file")
        sp.add_argument("--threads", type=int, default=1, help="worker cap")
        sp.add_argument("--seed", type=int, help="64-bit base seed")

    g = sub.add_parser("gen", help="write a generated graph as an edge list")
    g.add_argument("kind", choices=sorted(GENERATORS))
    g.add_argument("--n", type=int)
    g.add_argument("--k", type=int)
    g.add_argument("--r", type=int)
    g.add_argument("--bridge-weight", type=float, default=1.0)
    g.add_argument("-o", "--output")
    common(g, graph=False)

    pr = sub.add_parser("profile", help="expansion-profile threshold search")
    pr.add_argument("--phi", type=float, required=True)
    pr.add_argument("--eps", type=float, required=True)
    pr.add_argument("--seeds", type=int, nargs="+", help="restrict start vertices")
    common(pr)

    cl = sub.add_parser("cluster", help="ParESP local clustering from a start vertex")
    cl.add_argument("--start", type=int, required=True)
    cl.add_argument("--gamma", type=float, required=True)
    cl.add_argument("--phi", type=float, required=True)
    cl.add_argument("--eps", type=float, required=True)
    cl.add_argument("--c", type=float, default=esp.DEFAULT_CORE_CONSTANT)
    cl.add_argument("--max-copies", type=int, default=64)
    cl.add_argument("--horizon", type=int)
    cl.add_argument("--stop-phi", type=float)
    cl.add_argument("--stop-volume", type=float)
    cl.add_argument("--trace", help="line-delimited JSON trace of every copy")
    cl.add_argument("--figure", help="render the winning copy's sample path to this image")
    common(cl)

    cu = sub.add_parser("curve", help="per-step LS curve breakpoints (line-delimited JSON)")
    cu.add_argument("--start", type=int, required=True)
    cu.add_argument("--steps", type=int, required=True)
    cu.add_argument("--figure", help="render the curves to this image")
    common(cu)

    mx = sub.add_parser("mixing", help="uniform and TV mixing times")
    mx.add_argument("--epsilon", type=float, required=True)
    mx.add_argument("--gamma", type=float, help="volume for the expansion-profile lower bound")
    mx.add_argument("--phi-gamma", type=float, help="phi(gamma) if not computed exactly")
    mx.add_argument("--non-lazy", action="store_true")
    common(mx)

    ve = sub.add_parser("verify", help="run invariant suites on a graph")
    ve.add_argument("--suite", nargs="+", default=["all"], choices=["all", *verify.SUITES])
    common(ve)

    rp = sub.add_parser("replay", help="re-run a manifest and compare payloads")
    rp.add_argument("manifest_file", metavar="MANIFEST")
    rp.add_argument("--json", action="store_true")
    return p


def run(argv, out=None) -> int:
    """Execute ``argv``; ``out`` receives each line of standard output."""
    emit = out or (lambda s: print(s))
    try:
        args = build_parser().parse_args(argv)
        if args.command == "cluster" and args.seed is None:
            raise UsageError("cluster requires --seed")
        if getattr(args, "threads", 1) < 1:
            raise UsageError("--threads must be positive")
        started = time.perf_counter()
        if args.command == "gen":
            payload, text, code = cmd_gen(args)
        elif args.command == "replay":
            payload, text, code = cmd_replay(args)
        else:
            g = _load(args.graph)
            handler = {"profile": cmd_profile, "cluster": cmd_cluster, "curve": cmd_curve,
                       "mixing": cmd_mixing, "verify": cmd_verify}[args.command]
            payload, text, code = handler(args, g)
        wall = time.perf_counter() - started
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (OSError, GraphFormatError, json.JSONDecodeError, KeyError) as exc:
        print(f"localcut: {exc}", file=sys.stderr)
        return EXIT_IO

    if payload is not None:
        payload = {"schema": SCHEMA, "command": args.command, **payload}
    if payload is not None and args.json:
        emit(_dumps(payload))
    elif text:
        emit(text)
    if payload is not None and getattr(args, "manifest", None):
        manifest = {
            "schema": SCHEMA,
            "command": args.command,
            "argv": [a for a in _strip_manifest(list(argv))],
            "parameters": {k: v for k, v in vars(args).items() if k not in ("manifest",)},
            "seed": getattr(args, "seed", None),
            "graph_digest": _load(args.graph).digest() if getattr(args, "graph", None) else None,
            "version": __version__,
            "wall_time": wall,
            "payload": payload,
        }
        Path(args.manifest).write_text(json.dumps(manifest, indent=2, sort_keys=True, default=str) + "\n")
    return code


def _strip_manifest(argv: list[str]) -> list[str]:
    out, skip = [], False
    for a in argv:
        if skip:
            skip = False
            continue
        if a == "--manifest":
            skip = True
            continue
        if a.startswith("--manifest="):
            continue
        out.append(a)
    if "--json" not in out:
        out.append("--json")
    return out


def main(argv=None) -> int:
    return run(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
