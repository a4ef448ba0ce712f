"""Command-line front end.

Message files hold one ``SRC DST`` pair per line in decimal. ``#`` starts
a comment; a ``# size: N`` comment fixes the network size, otherwise N is
the smallest power of two above the largest address.
"""
from __future__ import annotations

import argparse
import io
import json
import os
import re
import sys
from dataclasses import dataclass

from . import bench
from .conflict import (
    MessageSet,
    analyze,
    iwm_conflict_matrix,
    window_link_occurrences,
    window_switch_occurrences,
)
from .sched import ALGORITHMS, MODES, Schedule, schedule
from .topology import NetworkConfig, route_path, shuffle

SIZE_HINT = re.compile(r"#\s*size\s*:\s*(\d+)")


class InputError(Exception):
    pass


class InvariantError(Exception):
    pass


@dataclass
class MessageFile:
    messages: MessageSet
    lines: list  # file line number of each entry


def _infer_size(max_addr: int, floor: int) -> int:
    n = 1
    while n <= max_addr:
        n <<= 1
    return max(n, floor)


def parse_messages(text: str, size: int | None = None, floor: int = 4) -> MessageFile:
    entries, lines, hint = [], [], None
    first_line = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        m = SIZE_HINT.match(raw.strip())
        if m:
            hint = int(m.group(1))
        body = raw.split("#", 1)[0].split()
        if not body:
            continue
        if len(body) != 2:
            raise InputError(f"line {lineno}: expected 'SRC DST', got {raw.strip()!r}")
        try:
            s, d = int(body[0]), int(body[1])
        except ValueError:
            raise InputError(f"line {lineno}: non-integer token in {raw.strip()!r}") from None
        if s < 0 or d < 0:
            raise InputError(f"line {lineno}: negative address")
        if s in first_line:
            raise InputError(f"line {lineno}: duplicate source {s} (first seen on line {first_line[s]})")
        first_line[s] = lineno
        entries.append((s, d))
        lines.append(lineno)
    max_addr = max((max(e) for e in entries), default=0)
    if size is None:
        size = hint if hint is not None else _infer_size(max_addr, floor)
    try:
        cfg = NetworkConfig(size)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    for (s, d), lineno in zip(entries, lines):
        if s >= size or d >= size:
            raise InputError(f"line {lineno}: address >= N={size}")
    return MessageFile(MessageSet(tuple(entries), cfg), lines)


def load_messages(path_or_stream, size: int | None = None, floor: int = 4) -> MessageSet:
    if hasattr(path_or_stream, "read"):
        text = path_or_stream.read()
    elif path_or_stream == "-":
        text = sys.stdin.read()
    else:
        with open(path_or_stream) as fh:
            text = fh.read()
    return parse_messages(text, size, floor).messages


def render_messages(ms: MessageSet) -> str:
    out = [f"# size: {ms.cfg.size}"]
    out += [f"{s} {d}" for s, d in ms]
    return "\n".join(out) + "\n"


def _trace_by_source(s: Schedule) -> dict:
    """Trace with message indices replaced by source addresses."""
    trace = s.trace_dict()
    for key in ("initial_pass1", "demoted", "selected_list", "conflicted_list", "order"):
        if key in trace:
            trace[key] = [s.ms.source(i) for i in trace[key]]
    return trace


def report_dict(s: Schedule) -> dict:
    return {
        "network": {"size": s.ms.cfg.size, "stages": s.ms.cfg.stages},
        "algorithm": s.algorithm,
        "mode": s.mode,
        "passes": s.passes_by_source(),
        "trace": _trace_by_source(s),
        "metrics": {
            "pass_count": s.pass_count,
            "switch_occurrences": [r.switch_count for r in s.reports],
            "link_occurrences": [r.link_count for r in s.reports],
        },
    }


def emit_report(s: Schedule, fmt: str = "json") -> str:
    d = report_dict(s)
    if fmt == "json":
        return json.dumps(d, indent=2) + "\n"
    cfg = s.ms.cfg
    if fmt == "csv":
        buf = io.StringIO()
        buf.write("pass,source,destination\n")
        for p, members in enumerate(s.passes, 1):
            for i in members:
                src, dst = s.ms.entries[i]
                buf.write(f"{p},{src},{dst}\n")
        return buf.getvalue()
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}")
    out = [f"{s.algorithm} ({s.mode}) on {cfg.size}x{cfg.size} omega network, {cfg.stages} stages"]
    for p, members in enumerate(s.passes):
        pairs = ", ".join(f"{cfg.bits(a)}->{cfg.bits(b)}" for a, b in (s.ms.entries[i] for i in members))
        out.append(f"pass {p + 1}: {pairs}")
        out.append(f"  switch occurrences {d['metrics']['switch_occurrences'][p]}, "
                   f"link occurrences {d['metrics']['link_occurrences'][p]}")
    for key, value in d["trace"].items():
        out.append(f"{key}: {value}")
    return "\n".join(out) + "\n"


def _occ_list(ms, occ):
    return [{"at": o.where, "id": o.resource, "pair": [ms.source(o.pair[0]), ms.source(o.pair[1])]}
            for o in occ]


def analyze_dict(ms: MessageSet) -> dict:
    rep = analyze(ms)
    ws = window_switch_occurrences(ms)
    wl = window_link_occurrences(ms)
    if ws != rep.switch_occurrences or wl != rep.link_occurrences:
        raise InvariantError("window predicates disagree with path simulation")
    iwm = iwm_conflict_matrix(ms)
    return {
        "network": {"size": ms.cfg.size, "stages": ms.cfg.stages},
        "messages": len(ms),
        "permutation": ms.is_permutation,
        "oracle": {
            "switch": {"occurrences": rep.switch_count, "distinct_pairs": len(rep.switch_pairs),
                       "list": _occ_list(ms, rep.switch_occurrences)},
            "link": {"occurrences": rep.link_count, "distinct_pairs": len(rep.link_pairs),
                     "list": _occ_list(ms, rep.link_occurrences)},
        },
        "windows": {
            "switch_occurrences": len(ws),
            "link_occurrences": len(wl),
            "agrees_with_oracle": True,
            "iwm_pairs": sorted(map(list, iwm.pairs())),
        },
    }


def analyze_text(d: dict) -> str:
    N = d["network"]["size"]
    out = [f"{d['messages']} messages on N={N} ({'permutation' if d['permutation'] else 'partial'})"]
    for kind in ("switch", "link"):
        o = d["oracle"][kind]
        out.append(f"{kind} conflicts: {o['occurrences']} occurrences, {o['distinct_pairs']} distinct pairs")
        where = "stage" if kind == "switch" else "boundary"
        for e in o["list"]:
            out.append(f"  {where} {e['at']} {kind} {e['id']}: {e['pair'][0]} / {e['pair'][1]}")
    out.append("window predicates agree with path simulation")
    return "\n".join(out) + "\n"


def dot_graph(cfg: NetworkConfig, ms: MessageSet | None = None) -> str:
    n, N = cfg.stages, cfg.size
    out = ["digraph omega {", "  rankdir=LR;", "  node [shape=point];"]
    out += [f'  "b0_{l}" [shape=plaintext, label="{cfg.bits(l)}"];' for l in range(N)]
    out += [f'  "b{n}_{l}" [shape=plaintext, label="{cfg.bits(l)}"];' for l in range(N)]
    for k in range(n):
        for sw in range(N // 2):
            out.append(f'  subgraph "cluster_s{k}_{sw}" {{ label="S{k}.{sw}"; '
                       f'"b{k + 1}_{2 * sw}"; "b{k + 1}_{2 * sw + 1}"; }}')
    for k in range(n):
        for l in range(N):
            sw = shuffle(l, cfg) >> 1
            for port in (0, 1):
                out.append(f'  "b{k}_{l}" -> "b{k + 1}_{2 * sw + port}" [color=gray80, arrowhead=none];')
    if ms is not None:
        rep = analyze(ms)
        bad_links = {(o.where, o.resource) for o in rep.link_occurrences}
        bad_switch = {(o.where, o.resource) for o in rep.switch_occurrences}
        for s, d in ms:
            p = route_path(s, d, cfg)
            for k in range(n):
                style = "color=black"
                if (k + 1, p.links[k + 1]) in bad_links:
                    style = "color=red, style=dashed, penwidth=2"
                elif (k, p.switches[k][1]) in bad_switch:
                    style = "color=orange, penwidth=2"
                out.append(f'  "b{k}_{p.links[k]}" -> "b{k + 1}_{p.links[k + 1]}" '
                           f'[{style}, label="{s}"];')
    out.append("}")
    return "\n".join(out) + "\n"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="omin", description="Omega network conflict analysis and pass scheduling")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    r = sub.add_parser("route", help="print the path of one message")
    r.add_argument("--src", type=int, required=True)
    r.add_argument("--dst", type=int, required=True)
    r.add_argument("--size", type=int, default=8)

    a = sub.add_parser("analyze", help="oracle and window conflict reports")
    a.add_argument("file")
    a.add_argument("--size", type=int)
    a.add_argument("--format", choices=("json", "text"), default="json")

    s = sub.add_parser("schedule", help="partition messages into passes")
    s.add_argument("file")
    s.add_argument("--algo", choices=ALGORITHMS, required=True)
    s.add_argument("--mode", choices=MODES, default="paper")
    s.add_argument("--size", type=int)
    s.add_argument("--format", choices=("json", "text", "csv"), default="json")

    b = sub.add_parser("bench", help="seeded comparison across algorithms, CSV out")
    b.add_argument("--config", help="JSON file with BenchmarkConfig fields")
    b.add_argument("--sizes", help="comma separated, e.g. 8,16,32")
    b.add_argument("--trials", type=int)
    b.add_argument("--seed", type=int)
    b.add_argument("--algos", help="comma separated algorithm ids")
    b.add_argument("--mode", choices=MODES)
    b.add_argument("--workers", type=int)
    b.add_argument("--timing", action="store_true", help="fill the micros column")
    b.add_argument("--out", help="write CSV here instead of stdout")

    d = sub.add_parser("dot", help="Graphviz diagram of the network")
    d.add_argument("file", nargs="?")
    d.add_argument("--size", type=int)
    return p


def _bench_config(args) -> bench.BenchmarkConfig:
    fields = {}
    if args.config:
        with open(args.config) as fh:
            fields.update(json.load(fh))
    if "seed" not in fields and os.environ.get("OMIN_SEED"):
        fields["seed"] = int(os.environ["OMIN_SEED"])
    if args.sizes:
        fields["sizes"] = [int(x) for x in args.sizes.split(",")]
    if args.algos:
        fields["algorithms"] = args.algos.split(",")
    for key in ("trials", "seed", "mode", "workers"):
        if getattr(args, key) is not None:
            fields[key] = getattr(args, key)
    if args.timing:
        fields["timing"] = True
    return bench.BenchmarkConfig(**fields)


def _run(args, out) -> None:
    if args.cmd == "route":
        try:
            cfg = NetworkConfig(args.size)
            p = route_path(args.src, args.dst, cfg)
        except ValueError as exc:
            raise InputError(str(exc)) from None
        out.write("links: " + ",".join(map(str, p.links)) + "\n")
        out.write("bits: " + " ".join(cfg.bits(l) for l in p.links) + "\n")
        out.write("switches: " + " ".join(f"{k}:{sw}" for k, sw in p.switches) + "\n")
    elif args.cmd == "analyze":
        ms = load_messages(args.file, args.size)
        d = analyze_dict(ms)
        out.write(json.dumps(d, indent=2) + "\n" if args.format == "json" else analyze_text(d))
    elif args.cmd == "schedule":
        floor = 8 if args.algo in ("asa", "rsa") else 4
        ms = load_messages(args.file, args.size, floor)
        try:
            s = schedule(ms, args.algo, args.mode)
        except ValueError as exc:
            raise InputError(str(exc)) from None
        if not s.is_partition():
            raise InvariantError("schedule is not a partition of its input")
        out.write(emit_report(s, args.format))
    elif args.cmd == "bench":
        try:
            cfg = _bench_config(args)
        except (TypeError, ValueError) as exc:
            raise InputError(str(exc)) from None
        rows = bench.run_suite(cfg)
        if args.out:
            with open(args.out, "w", newline="") as fh:
                bench.write_csv(rows, fh)
        else:
            out.write(bench.write_csv(rows))
    elif args.cmd == "dot":
        if args.file:
            ms = load_messages(args.file, args.size)
            out.write(dot_graph(ms.cfg, ms))
        else:
            try:
                cfg = NetworkConfig(args.size or 8)
            except ValueError as exc:
                raise InputError(str(exc)) from None
            out.write(dot_graph(cfg))


def dispatch(argv=None, out=None) -> int:
    out = out if out is not None else sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _run(args, out)
    except (InputError, OSError, ValueError) as exc:
        print(f"omin: {exc}", file=sys.stderr)
        return 1
    except (InvariantError, AssertionError) as exc:
        print(f"omin: internal invariant violated: {exc}", file=sys.stderr)
        return 2
    return 0


def main():
    sys.exit(dispatch())
