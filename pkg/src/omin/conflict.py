"""Message sets, combination matrices and conflict detection.

Two detectors live here side by side: the path oracle, which walks every
message through the network and looks for shared switches and lines, and
the window predicates, which compare slices of the source||destination
bit strings. They must always agree.
"""
from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

from .topology import NetworkConfig, simulate_path


@dataclass(frozen=True)
class MessageSet:
    entries: tuple
    cfg: NetworkConfig

    def __post_init__(self):
        entries = tuple((int(s), int(d)) for s, d in self.entries)
        object.__setattr__(self, "entries", entries)
        seen = set()
        for s, d in entries:
            self.cfg.check(s)
            self.cfg.check(d)
            if s in seen:
                raise ValueError(f"duplicate source address {s}")
            seen.add(s)

    @classmethod
    def from_pairs(cls, pairs: Iterable, size: int) -> "MessageSet":
        return cls(tuple(pairs), NetworkConfig(size))

    @classmethod
    def from_destinations(cls, dests) -> "MessageSet":
        """Full message set where source i sends to dests[i]."""
        dests = list(dests)
        return cls(tuple(enumerate(dests)), NetworkConfig(len(dests)))

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def sources(self) -> tuple:
        return tuple(s for s, _ in self.entries)

    @property
    def destinations(self) -> tuple:
        return tuple(d for _, d in self.entries)

    @property
    def is_permutation(self) -> bool:
        full = set(range(self.cfg.size))
        return (len(self.entries) == self.cfg.size
                and set(self.sources) == full
                and set(self.destinations) == full)

    def source(self, i: int) -> int:
        return self.entries[i][0]

    def index_of(self, source: int) -> int:
        for i, (s, _) in enumerate(self.entries):
            if s == source:
                return i
        raise KeyError(source)

    def subset(self, indices) -> "MessageSet":
        return MessageSet(tuple(self.entries[i] for i in indices), self.cfg)


def combination_row(s: int, d: int, cfg: NetworkConfig) -> str:
    return cfg.bits(s) + cfg.bits(d)


@dataclass(frozen=True)
class CombinationMatrix:
    rows: tuple

    @classmethod
    def of(cls, ms: MessageSet) -> "CombinationMatrix":
        return cls(tuple(combination_row(s, d, ms.cfg) for s, d in ms))

    @property
    def width(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    def transpose(self) -> tuple:
        """Column j of the matrix as a tuple of ints, for every j."""
        return tuple(tuple(int(r[j]) for r in self.rows) for j in range(self.width))


def _stages_of(row: str) -> int:
    if len(row) % 2 or len(row) < 4:
        raise ValueError(f"combination row must have even length >= 4, got {row!r}")
    return len(row) // 2


def switch_window(row: str, k: int) -> str:
    """Bits of the row that name the switch used at stage k (width n-1)."""
    n = _stages_of(row)
    if not 0 <= k < n:
        raise ValueError(f"stage {k} out of range 0..{n - 1}")
    return row[k + 1:k + n]


def link_window(row: str, b: int) -> str:
    """Bits of the row that name the line used at boundary b (width n)."""
    n = _stages_of(row)
    if not 0 <= b <= n:
        raise ValueError(f"boundary {b} out of range 0..{n}")
    return row[b:b + n]


class Occurrence(NamedTuple):
    where: int      # stage (switch) or boundary (link)
    resource: int   # switch index or line id
    pair: tuple     # (i, j) message indices, i < j


@dataclass
class ConflictReport:
    switch_occurrences: list = field(default_factory=list)
    link_occurrences: list = field(default_factory=list)

    @property
    def switch_pairs(self) -> frozenset:
        return frozenset(o.pair for o in self.switch_occurrences)

    @property
    def link_pairs(self) -> frozenset:
        return frozenset(o.pair for o in self.link_occurrences)

    @property
    def switch_count(self) -> int:
        return len(self.switch_occurrences)

    @property
    def link_count(self) -> int:
        return len(self.link_occurrences)


def _indices(ms: MessageSet, indices) -> list:
    return list(range(len(ms))) if indices is None else sorted(indices)


def _collect(keyed) -> list:
    """Turn (where, resource, message) triples into pairwise occurrences."""
    buckets = defaultdict(list)
    for where, resource, i in keyed:
        buckets[where, resource].append(i)
    out = []
    for (where, resource), members in buckets.items():
        for i, j in itertools.combinations(sorted(members), 2):
            out.append(Occurrence(where, resource, (i, j)))
    out.sort()
    return out


def _paths(ms, idx):
    return [(i, simulate_path(*ms.entries[i], ms.cfg)) for i in idx]


def switch_conflicts(ms: MessageSet, indices=None) -> ConflictReport:
    """Shared-switch occurrences among the chosen messages, by path simulation."""
    paths = _paths(ms, _indices(ms, indices))
    occ = _collect((k, sw, i) for i, p in paths for k, sw in p.switches)
    return ConflictReport(switch_occurrences=occ)


def link_conflicts(ms: MessageSet, indices=None) -> ConflictReport:
    """Shared-line occurrences at every boundary 0..n, by path simulation."""
    paths = _paths(ms, _indices(ms, indices))
    occ = _collect((b, line, i) for i, p in paths for b, line in enumerate(p.links))
    return ConflictReport(link_occurrences=occ)


def analyze(ms: MessageSet, indices=None) -> ConflictReport:
    idx = _indices(ms, indices)
    paths = _paths(ms, idx)
    return ConflictReport(
        switch_occurrences=_collect((k, sw, i) for i, p in paths for k, sw in p.switches),
        link_occurrences=_collect((b, line, i) for i, p in paths for b, line in enumerate(p.links)),
    )


def window_switch_occurrences(ms: MessageSet, indices=None, stages=None) -> list:
    rows = CombinationMatrix.of(ms).rows
    n = ms.cfg.stages
    stages = range(n) if stages is None else stages
    idx = _indices(ms, indices)
    return _collect((k, int(switch_window(rows[i], k), 2), i) for i in idx for k in stages)


def window_link_occurrences(ms: MessageSet, indices=None) -> list:
    rows = CombinationMatrix.of(ms).rows
    n = ms.cfg.stages
    idx = _indices(ms, indices)
    return _collect((b, int(link_window(rows[i], b), 2), i) for i in idx for b in range(n + 1))


def wm_conflict_pairs(ms: MessageSet, indices=None) -> set:
    """Message-index pairs whose optical windows coincide at some stage."""
    return {o.pair for o in window_switch_occurrences(ms, indices)}


def window_link_pairs(ms: MessageSet, indices=None) -> set:
    return {o.pair for o in window_link_occurrences(ms, indices)}


@dataclass
class ConflictMatrix:
    """N x N 0/1 matrix indexed by source address, upper triangle only."""
    cells: list

    @classmethod
    def zeros(cls, size: int) -> "ConflictMatrix":
        return cls([[0] * size for _ in range(size)])

    @property
    def size(self) -> int:
        return len(self.cells)

    def mark(self, a: int, b: int):
        if a == b:
            raise ValueError("a message cannot conflict with itself")
        i, j = min(a, b), max(a, b)
        self.cells[i][j] = 1

    @property
    def sums(self) -> list:
        return [sum(row) for row in self.cells]

    def pairs(self) -> set:
        return {(i, j) for i, row in enumerate(self.cells) for j, v in enumerate(row) if v}

    def degrees(self) -> list:
        deg = [0] * self.size
        for i, j in self.pairs():
            deg[i] += 1
            deg[j] += 1
        return deg


def iwm_conflict_matrix(ms: MessageSet) -> ConflictMatrix:
    """Improved Window Method: seed the (i, i+N/2) pairs, skip the first window."""
    N = ms.cfg.size
    cm = ConflictMatrix.zeros(N)
    present = set(ms.sources)
    for i in range(N // 2):
        if i in present and i + N // 2 in present:
            cm.mark(i, i + N // 2)
    for o in window_switch_occurrences(ms, stages=range(1, ms.cfg.stages)):
        i, j = o.pair
        cm.mark(ms.source(i), ms.source(j))
    return cm


def rsa_windows(row: str) -> tuple:
    """The two width-2 windows over the middle four columns of a row."""
    n = _stages_of(row)
    middle = row[n - 2:n + 2]
    return middle[1:3], middle[2:4]


def rsa_conflict_matrix(ms: MessageSet) -> ConflictMatrix:
    if ms.cfg.size < 8:
        raise ValueError("route selection needs N >= 8")
    cm = ConflictMatrix.zeros(ms.cfg.size)
    rows = CombinationMatrix.of(ms).rows
    for o in _collect((w, int(win, 2), i) for i, r in enumerate(rows)
                      for w, win in enumerate(rsa_windows(r))):
        i, j = o.pair
        cm.mark(ms.source(i), ms.source(j))
    return cm
