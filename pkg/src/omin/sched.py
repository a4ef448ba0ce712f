"""Time-domain pass scheduling.

Every scheduler returns a Schedule: an ordered partition of the message
indices into passes, with a full oracle ConflictReport per pass.

Modes for ASA and RSA:
  paper   exactly two passes; pass 1 resolved against the algorithm's own
          rule (first-stage pairs for ASA, link oracle for RSA); whatever
          is left over in pass 2 is reported but not resolved.
  strict  pass 1 resolved against the full oracle (switch for ASA, link
          for RSA) and the leftovers are split the same way until every
          pass is clean.
"""
from __future__ import annotations

import enum
from dataclasses import asdict, dataclass, field
from typing import Callable

from .conflict import (
    CombinationMatrix,
    ConflictMatrix,
    MessageSet,
    analyze,
    iwm_conflict_matrix,
    link_conflicts,
    rsa_conflict_matrix,
    switch_conflicts,
    wm_conflict_pairs,
)

MODES = ("paper", "strict")


@dataclass
class Schedule:
    algorithm: str
    ms: MessageSet
    passes: list
    reports: list = field(default_factory=list)
    trace: object = None
    mode: str = "paper"

    def __post_init__(self):
        self.passes = [list(p) for p in self.passes if p]
        if not self.reports:
            self.reports = [analyze(self.ms, p) for p in self.passes]

    @property
    def pass_count(self) -> int:
        return len(self.passes)

    def is_partition(self) -> bool:
        flat = [i for p in self.passes for i in p]
        return len(flat) == len(set(flat)) and set(flat) == set(range(len(self.ms)))

    def passes_by_source(self) -> list:
        return [[self.ms.source(i) for i in p] for p in self.passes]

    def trace_dict(self) -> dict:
        if self.trace is None:
            return {}
        return asdict(self.trace)


@dataclass
class AsaTrace:
    middle_rows: list
    pair_sums: list
    diff: list
    initial_pass1: list
    demoted: list
    partial: bool = False


@dataclass
class RsaTrace:
    row_sums: list
    selected_list: list
    conflicted_list: list
    demoted: list
    selected_link_occurrences: int = 0
    partial: bool = False


@dataclass
class OrderTrace:
    order: list
    strategy: str = "input"


class HeuristicStrategy(enum.Enum):
    ASCENDING = "ascending"
    DESCENDING = "descending"
    MIN_DEGREE = "min_degree"
    MAX_DEGREE = "max_degree"


def greedy_partition(ms: MessageSet, conflict_pairs, order, algorithm="greedy") -> Schedule:
    """First-fit: each message joins the earliest pass it does not conflict with."""
    order = list(order)
    if sorted(order) != list(range(len(ms))):
        raise ValueError("order must be a permutation of the message indices")
    adj = {i: set() for i in order}
    for i, j in conflict_pairs:
        adj[i].add(j)
        adj[j].add(i)
    passes: list[list[int]] = []
    for i in order:
        for p in passes:
            if not adj[i].intersection(p):
                p.append(i)
                break
        else:
            passes.append([i])
    return Schedule(algorithm, ms, passes, trace=OrderTrace(order))


def heuristic_order(ms: MessageSet, cm: ConflictMatrix, strategy: HeuristicStrategy) -> list:
    strategy = HeuristicStrategy(strategy)
    idx = range(len(ms))
    if strategy is HeuristicStrategy.ASCENDING:
        return sorted(idx, key=ms.source)
    if strategy is HeuristicStrategy.DESCENDING:
        return sorted(idx, key=ms.source, reverse=True)
    deg = cm.degrees()
    sign = 1 if strategy is HeuristicStrategy.MIN_DEGREE else -1
    return sorted(idx, key=lambda i: (sign * deg[ms.source(i)], ms.source(i)))


def _index_pairs(ms: MessageSet, cm: ConflictMatrix) -> set:
    pos = {s: i for i, s in enumerate(ms.sources)}
    return {tuple(sorted((pos[a], pos[b]))) for a, b in cm.pairs()}


def wm_schedule(ms: MessageSet) -> Schedule:
    return greedy_partition(ms, wm_conflict_pairs(ms), range(len(ms)), algorithm="wm")


def heuristic_schedule(ms: MessageSet, strategy) -> Schedule:
    strategy = HeuristicStrategy(strategy)
    cm = iwm_conflict_matrix(ms)
    order = heuristic_order(ms, cm, strategy)
    s = greedy_partition(ms, _index_pairs(ms, cm), order, algorithm=HEURISTIC_IDS[strategy])
    s.trace.strategy = strategy.value
    return s


# pair sources: callables mapping a list of message indices to a list of
# (sort key, (i, j)) with key = (stage or boundary, switch or line, lower source)

def _keyed(ms, occurrences):
    return [((o.where, o.resource, min(ms.source(o.pair[0]), ms.source(o.pair[1]))), o.pair)
            for o in occurrences]


def first_stage_pairs(ms: MessageSet) -> Callable:
    return lambda idx: _keyed(ms, [o for o in switch_conflicts(ms, idx).switch_occurrences
                                   if o.where == 0])


def switch_pairs(ms: MessageSet) -> Callable:
    return lambda idx: _keyed(ms, switch_conflicts(ms, idx).switch_occurrences)


def link_pairs(ms: MessageSet) -> Callable:
    return lambda idx: _keyed(ms, link_conflicts(ms, idx).link_occurrences)


def demote_lower_source(ms: MessageSet) -> Callable:
    return lambda i, j: min(i, j, key=ms.source)


def resolve_pairs(members, pair_source: Callable, demote_rule: Callable):
    """Drop one member of a conflicting pair at a time until none is left.

    The pair with the smallest key goes first; demote_rule picks the loser.
    Returns (kept, demoted), both keeping their original order.
    """
    kept = list(members)
    demoted = []
    while True:
        found = pair_source(kept)
        if not found:
            return kept, demoted
        _, (i, j) = min(found)
        loser = demote_rule(i, j)
        kept.remove(loser)
        demoted.append(loser)


def _drain(ms, rest, pair_source) -> list:
    passes = []
    while rest:
        kept, rest = resolve_pairs(rest, pair_source, demote_lower_source(ms))
        passes.append(kept)
    return passes


def _check_two_pass_input(ms: MessageSet, mode: str, name: str):
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if ms.cfg.size < 8:
        raise ValueError(f"{name} needs N >= 8, got N={ms.cfg.size}")


def asa_middle_rows(cm: CombinationMatrix) -> tuple:
    """Rows r_{n-2} .. r_{n+1} of the transposed combination matrix."""
    n = cm.width // 2
    if n < 3:
        raise ValueError("address selection needs N >= 8")
    return cm.transpose()[n - 2:n + 2]


def asa_diff_vector(rows) -> list:
    r1, r2, r3, r4 = rows
    if not len(r1) == len(r2) == len(r3) == len(r4):
        raise ValueError("rows must have equal length")
    return [a + b - c - d for a, b, c, d in zip(r1, r2, r3, r4)]


def asa_schedule(ms: MessageSet, mode: str = "paper") -> Schedule:
    _check_two_pass_input(ms, mode, "address selection")
    rows = asa_middle_rows(CombinationMatrix.of(ms))
    diff = asa_diff_vector(rows)
    first = [j for j, v in enumerate(diff) if v <= 0]
    rest = [j for j, v in enumerate(diff) if v > 0]
    rule = first_stage_pairs(ms) if mode == "paper" else switch_pairs(ms)
    kept, demoted = resolve_pairs(first, rule, demote_lower_source(ms))
    remaining = rest + demoted
    if mode == "paper":
        passes = [kept, remaining]
    else:
        passes = [kept] + _drain(ms, remaining, rule)
    trace = AsaTrace(
        middle_rows=[list(r) for r in rows],
        pair_sums=[[a + b for a, b in zip(rows[0], rows[1])],
                   [c + d for c, d in zip(rows[2], rows[3])]],
        diff=diff,
        initial_pass1=first,
        demoted=demoted,
        partial=not ms.is_permutation,
    )
    return Schedule("asa", ms, passes, trace=trace, mode=mode)


def rsa_schedule(ms: MessageSet, mode: str = "paper") -> Schedule:
    _check_two_pass_input(ms, mode, "route selection")
    cm = rsa_conflict_matrix(ms)
    sums = cm.sums
    row_sums = [sums[s] for s in ms.sources]
    selected = [i for i, v in enumerate(row_sums) if v == 0]
    conflicted = [i for i, v in enumerate(row_sums) if v != 0]
    top = sorted(conflicted, key=ms.source, reverse=True)[:2]
    selected += sorted(top, key=ms.source)
    conflicted = [i for i in conflicted if i not in top]
    before = link_conflicts(ms, selected).link_count
    rule = link_pairs(ms)
    kept, demoted = resolve_pairs(selected, rule, demote_lower_source(ms))
    remaining = conflicted + demoted
    if mode == "paper":
        passes = [kept, remaining]
    else:
        passes = [kept] + _drain(ms, remaining, rule)
    trace = RsaTrace(
        row_sums=row_sums,
        selected_list=selected,
        conflicted_list=conflicted,
        demoted=demoted,
        selected_link_occurrences=before,
        partial=not ms.is_permutation,
    )
    return Schedule("rsa", ms, passes, trace=trace, mode=mode)


HEURISTIC_IDS = {
    HeuristicStrategy.ASCENDING: "heur-asc",
    HeuristicStrategy.DESCENDING: "heur-desc",
    HeuristicStrategy.MIN_DEGREE: "heur-min",
    HeuristicStrategy.MAX_DEGREE: "heur-max",
}

ALGORITHMS = ("wm", "heur-asc", "heur-desc", "heur-min", "heur-max", "asa", "rsa")


def schedule(ms: MessageSet, algorithm: str, mode: str = "paper") -> Schedule:
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if algorithm == "wm":
        s = wm_schedule(ms)
    elif algorithm == "asa":
        return asa_schedule(ms, mode)
    elif algorithm == "rsa":
        return rsa_schedule(ms, mode)
    else:
        by_id = {v: k for k, v in HEURISTIC_IDS.items()}
        if algorithm not in by_id:
            raise ValueError(f"unknown algorithm {algorithm!r}")
        s = heuristic_schedule(ms, by_id[algorithm])
    s.mode = mode
    return s
