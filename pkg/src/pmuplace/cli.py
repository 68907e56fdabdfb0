"""Command-line front end: solve, enumerate, verify, bench, oracle.

Machine-readable records are UTF-8 text, one ``key=value`` per line, in a
fixed key order.  Keys ending in ``wall_time_s`` carry timings; everything
else is deterministic for a fixed seed and input.
"""
from __future__ import annotations

import argparse
import hashlib
import sys
import time
import warnings
from dataclasses import asdict

import numpy as np

from . import __version__
from .bip import solve_bip
from .nlp import SqpConfig, StartStrategy, distinct_solutions, run_starts
from .observability import ProductConstraints, coverage, is_observable, sori
from .oracle import OracleCapExceeded, min_dominating_set_exact
from .report import CONVERGED, FAILED, INFEASIBLE, ITERATION_LIMIT, NON_BINARY, OPTIMAL
from .topology import NetworkParseError, build_connectivity, load_network, resolve

RECORD_VERSION = 1

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2
EXIT_INFEASIBLE = 3
EXIT_LIMIT = 4
EXIT_NON_BINARY = 5

STATUS_EXIT = {
    OPTIMAL: EXIT_OK,
    CONVERGED: EXIT_OK,
    INFEASIBLE: EXIT_INFEASIBLE,
    ITERATION_LIMIT: EXIT_LIMIT,
    NON_BINARY: EXIT_NON_BINARY,
    FAILED: EXIT_FAILED,
}


class InputError(Exception):
    pass


# records

class Record:
    def __init__(self, command):
        self.items: list[tuple[str, str]] = []
        self.add("record_version", RECORD_VERSION)
        self.add("tool_version", __version__)
        self.add("command", command)

    def add(self, key, value):
        if isinstance(value, (list, tuple)):
            value = ",".join(str(v) for v in value)
        elif isinstance(value, float):
            value = repr(value)
        self.items.append((key, str(value)))

    def text(self) -> str:
        return "".join(f"{k}={v}\n" for k, v in self.items)


def parse_record(text: str) -> dict[str, str]:
    out = {}
    for line in text.splitlines():
        if line.strip():
            key, _, value = line.partition("=")
            out[key] = value
    return out


def strip_timings(text: str) -> str:
    return "".join(l + "\n" for l in text.splitlines() if not l.split("=", 1)[0].endswith("wall_time_s"))


def _emit(rec: Record, path):
    if path is None:
        return
    if path == "-":
        sys.stdout.write(rec.text())
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(rec.text())


# inputs

def _load(source):
    try:
        path = resolve(source)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            net = load_network(str(path))
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
    except (FileNotFoundError, NetworkParseError) as exc:
        raise InputError(str(exc)) from None
    digest = hashlib.sha256(path.read_bytes()).hexdigest()
    return net, digest


def _weights(net, path):
    w = np.ones(net.n)
    if path is None:
        return w
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].split()
                if not line:
                    continue
                if len(line) != 2:
                    raise InputError(f"{path}: line {lineno}: expected 'bus weight'")
                w[net.index_of(int(line[0]))] = float(line[1])
    except (OSError, ValueError, KeyError) as exc:
        raise InputError(f"{path}: {exc}") from None
    if np.any(w <= 0):
        raise InputError(f"{path}: weights must be positive")
    return w


def _parse_labels(text):
    try:
        return [int(t) for t in text.replace(" ", "").split(",") if t]
    except ValueError:
        raise InputError(f"bad placement list {text!r}") from None


def _fmt(v):
    return f"{v:g}" if isinstance(v, float) else str(v)


# solver wrappers

def _run_bip(net, w, args):
    A = build_connectivity(net)
    rep = solve_bip(A, w, node_limit=args.max_nodes)
    return rep, rep


def _run_nlp(net, w, args):
    cfg = SqpConfig(tol_con=args.tol, tol_x=args.tol, tol_fun=args.tol, max_iter=args.max_iter)
    strategy = StartStrategy(args.strategy, args.starts, args.seed)
    pc = ProductConstraints(net)
    reports = run_starts(pc, w, strategy, cfg)
    found = distinct_solutions(reports, pc.A)
    return (found[0] if found else reports[0]), reports


def _result_fields(rec, prefix, net, rep, A):
    rec.add(f"{prefix}status", rep.status)
    if rep.placement is not None:
        rec.add(f"{prefix}pmus", rep.count)
        rec.add(f"{prefix}objective", float(rep.objective))
        rec.add(f"{prefix}placement", net.placement_labels(rep.placement))
        rec.add(f"{prefix}sori", sori(A, rep.placement))
        rec.add(f"{prefix}observable", str(is_observable(A, rep.placement)).lower())
    rec.add(f"{prefix}iterations", rep.iterations)
    for k in sorted(rep.residuals):
        rec.add(f"{prefix}residual.{k}", float(rep.residuals[k]))


# commands

def cmd_solve(args) -> int:
    net, digest = _load(args.network)
    w = _weights(net, args.weights)
    A = build_connectivity(net)
    t0 = time.perf_counter()
    rep, extra = (_run_bip if args.method == "bip" else _run_nlp)(net, w, args)
    elapsed = time.perf_counter() - t0

    print(f"system   {net.name} (n={net.n}, branches={len(net.branches)})")
    print(f"method   {args.method}")
    print(f"status   {rep.status}")
    if rep.placement is not None:
        print(f"result   {rep.count} PMUs, objective {_fmt(float(rep.objective))}, SORI {sori(A, rep.placement)}")
        print(f"buses    {', '.join(map(str, net.placement_labels(rep.placement)))}")
    if args.method == "nlp":
        ok = sum(r.ok for r in extra)
        print(f"starts   {len(extra)} ({ok} converged)")
    for k in sorted(rep.residuals):
        print(f"  {k:<14} {_fmt(float(rep.residuals[k]))}")

    rec = Record("solve")
    rec.add("input", net.name)
    rec.add("input_sha256", digest)
    rec.add("method", args.method)
    rec.add("seed", args.seed)
    _config_fields(rec, args)
    _result_fields(rec, "result.", net, rep, A)
    rec.add("result.wall_time_s", elapsed)
    _emit(rec, args.record)
    return STATUS_EXIT[rep.status]


def _config_fields(rec, args):
    if args.method == "nlp":
        cfg = SqpConfig(tol_con=args.tol, tol_x=args.tol, tol_fun=args.tol, max_iter=args.max_iter)
        for k, v in asdict(cfg).items():
            rec.add(f"config.{k}", v)
        rec.add("config.starts", args.starts)
        rec.add("config.strategy", args.strategy)
    else:
        rec.add("config.max_nodes", args.max_nodes)


def cmd_enumerate(args) -> int:
    net, digest = _load(args.network)
    w = _weights(net, args.weights)
    A = build_connectivity(net)
    args.method = "nlp"
    t0 = time.perf_counter()
    _, reports = _run_nlp(net, w, args)
    elapsed = time.perf_counter() - t0
    found = distinct_solutions(reports, A)

    rec = Record("enumerate")
    rec.add("input", net.name)
    rec.add("input_sha256", digest)
    rec.add("seed", args.seed)
    _config_fields(rec, args)
    rec.add("starts_converged", sum(r.ok for r in reports))
    rec.add("distinct", len(found))
    if not found:
        print("no converged start")
        _emit(rec, args.record)
        return STATUS_EXIT[reports[0].status]

    best = found[0].objective
    top_sori = max(sori(A, r.placement) for r in found if r.objective == best)
    print(f"{'rank':>4}  {'PMUs':>4}  {'SORI':>4}  {'start':>5}  placement")
    for k, r in enumerate(found, start=1):
        s = sori(A, r.placement)
        if r.objective > best:
            flag = "suboptimal"
        elif s == top_sori:
            flag = "* max SORI"
        else:
            flag = ""
        labels = net.placement_labels(r.placement)
        print(f"{k:>4}  {r.count:>4}  {s:>4}  {r.start_index:>5}  {','.join(map(str, labels))}  {flag}".rstrip())
        p = f"solution.{k}."
        rec.add(p + "pmus", r.count)
        rec.add(p + "objective", float(r.objective))
        rec.add(p + "sori", s)
        rec.add(p + "placement", labels)
        rec.add(p + "start", r.start_index)
        rec.add(p + "flag", flag.replace("* ", "").replace(" ", "-") or "none")
    rec.add("wall_time_s", elapsed)
    _emit(rec, args.record)
    return EXIT_OK


def cmd_verify(args) -> int:
    net, digest = _load(args.network)
    A = build_connectivity(net)
    try:
        x = net.placement(_parse_labels(args.placement))
    except KeyError as exc:
        raise InputError(str(exc.args[0])) from None
    cov = coverage(A, x)
    ok = is_observable(A, x)
    missing = [net.labels[i] for i in np.flatnonzero(cov < 1)]
    print(f"{'bus':>6}  coverage")
    for i in range(net.n):
        print(f"{net.labels[i]:>6}  {cov[i]}")
    print(f"observable  {'yes' if ok else 'no'}")
    if missing:
        print(f"unobserved  {', '.join(map(str, missing))}")
    print(f"PMUs        {int(x.sum())}")
    print(f"SORI        {sori(A, x)}")

    rec = Record("verify")
    rec.add("input", net.name)
    rec.add("input_sha256", digest)
    rec.add("placement", net.placement_labels(x))
    rec.add("pmus", int(x.sum()))
    rec.add("observable", str(ok).lower())
    rec.add("unobserved", missing)
    rec.add("sori", sori(A, x))
    rec.add("coverage", cov.tolist())
    _emit(rec, args.record)
    return EXIT_OK if ok else EXIT_INFEASIBLE


def cmd_bench(args) -> int:
    systems = [s for s in args.systems.split(",") if s]
    methods = [m for m in args.methods.split(",") if m]
    for m in methods:
        if m not in ("bip", "nlp"):
            raise InputError(f"unknown method {m!r}")
    loaded = [(s, *_load(s)) for s in systems]

    rec = Record("bench")
    rec.add("seed", args.seed)
    rec.add("config.starts", args.starts)
    rec.add("config.strategy", args.strategy)
    rec.add("config.max_nodes", args.max_nodes)
    rec.add("systems", systems)
    rec.add("methods", methods)
    print(f"{'system':<10} {'method':<6} {'best':>5} {'status':<16} {'time [s]':>9}")
    code = EXIT_OK
    for name, net, digest in loaded:
        w = np.ones(net.n)
        A = build_connectivity(net)
        for m in methods:
            args.method = m
            t0 = time.perf_counter()
            rep, _ = (_run_bip if m == "bip" else _run_nlp)(net, w, args)
            elapsed = time.perf_counter() - t0
            best = rep.count if rep.placement is not None else "-"
            print(f"{name:<10} {m:<6} {best:>5} {rep.status:<16} {elapsed:>9.2f}")
            p = f"bench.{name}.{m}."
            rec.add(p + "input_sha256", digest)
            _result_fields(rec, p, net, rep, A)
            rec.add(p + "wall_time_s", elapsed)
            if STATUS_EXIT[rep.status] != EXIT_OK and code == EXIT_OK:
                code = STATUS_EXIT[rep.status]
    _emit(rec, args.record)
    return code


def cmd_oracle(args) -> int:
    net, digest = _load(args.network)
    try:
        res = min_dominating_set_exact(net, size_cap=args.size_cap, n_cap=args.n_cap)
    except OracleCapExceeded as exc:
        raise InputError(str(exc)) from None
    A = build_connectivity(net)
    rec = Record("oracle")
    rec.add("input", net.name)
    rec.add("input_sha256", digest)
    rec.add("nodes", res.nodes)
    if res.size < 0:
        print("no dominating set within the size cap")
        rec.add("size", "none")
        _emit(rec, args.record)
        return EXIT_LIMIT
    print(f"minimum size {res.size}, {len(res.placements)} optimal placements ({res.nodes} nodes)")
    rec.add("size", res.size)
    rec.add("count", len(res.placements))
    for k, x in enumerate(res.vectors(net.n), start=1):
        labels = net.placement_labels(x)
        print(f"  {','.join(map(str, labels))}  SORI {sori(A, x)}")
        rec.add(f"placement.{k}", labels)
    _emit(rec, args.record)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pmuplace", description="Minimum PMU placement for full observability.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, network=True):
        if network:
            sp.add_argument("network", help="network file or bundled system (ieee14 ... ieee300)")
        sp.add_argument("--record", metavar="PATH", help="write a key=value record to PATH ('-' for stdout)")

    def nlp_opts(sp, starts):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--starts", type=int, default=starts, help="number of SQP starts; start 1 is all ones")
        sp.add_argument("--strategy", default="grid-random", choices=["all-ones", "grid-random", "uniform-random"])
        sp.add_argument("--tol", type=float, default=1e-6)
        sp.add_argument("--max-iter", type=int, default=200)
        sp.add_argument("--max-nodes", type=int, default=100_000, help="branch-and-bound node limit")

    sp = sub.add_parser("solve", help="minimum placement with one method")
    common(sp)
    sp.add_argument("--method", choices=["bip", "nlp"], default="bip")
    sp.add_argument("--weights", metavar="FILE", help="lines 'bus weight'; unlisted buses weigh 1")
    nlp_opts(sp, 50)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("enumerate", help="distinct optima from multi-start SQP, ranked by SORI")
    common(sp)
    sp.add_argument("--weights", metavar="FILE")
    nlp_opts(sp, 50)
    sp.set_defaults(func=cmd_enumerate)

    sp = sub.add_parser("verify", help="coverage, observability and SORI of a placement")
    common(sp)
    sp.add_argument("--placement", required=True, help='comma-separated bus labels, e.g. "2,6,7,9"')
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("bench", help="best PMU count per system and method")
    common(sp, network=False)
    sp.add_argument("--systems", default="ieee14,ieee30,ieee57,ieee118,ieee300")
    sp.add_argument("--methods", default="bip,nlp")
    nlp_opts(sp, 50)
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("oracle", help="all minimum dominating sets of a small network")
    common(sp)
    sp.add_argument("--size-cap", type=int)
    sp.add_argument("--n-cap", type=int, default=30)
    sp.set_defaults(func=cmd_oracle)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
