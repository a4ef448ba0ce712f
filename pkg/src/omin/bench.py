"""Seeded comparison runs across all schedulers.

Permutations come from Python's MT19937 (``random.Random(seed)``) driving a
descending Fisher-Yates shuffle of 0..N-1 with ``randrange``; the integer
seeding and ``getrandbits`` stream of MT19937 are stable across platforms
and Python versions.
"""
from __future__ import annotations

import csv
import io
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .conflict import MessageSet
from .sched import ALGORITHMS, MODES, Schedule, schedule

CSV_COLUMNS = ("algorithm", "N", "seed", "trial", "passes", "total_switch_occurrences",
               "total_link_occurrences", "max_pass_switch", "max_pass_link", "micros")


def random_permutation(N: int, seed: int) -> MessageSet:
    if not isinstance(N, int) or N < 4 or N & (N - 1):
        raise ValueError(f"N must be a power of two >= 4, got {N!r}")
    rng = random.Random(seed)
    dests = list(range(N))
    for i in range(N - 1, 0, -1):
        j = rng.randrange(i + 1)
        dests[i], dests[j] = dests[j], dests[i]
    return MessageSet.from_destinations(dests)


@dataclass
class RunMetrics:
    algorithm: str
    N: int
    seed: int | None = None
    trial: int | None = None
    pass_count: int = 0
    switch_occurrences: list = field(default_factory=list)
    link_occurrences: list = field(default_factory=list)
    distinct_pairs: list = field(default_factory=list)
    micros: int = 0
    error: str | None = None

    @property
    def total_switch(self) -> int:
        return sum(self.switch_occurrences)

    @property
    def total_link(self) -> int:
        return sum(self.link_occurrences)

    def csv_row(self) -> list:
        if self.error:
            return [self.algorithm, self.N, self.seed, self.trial, f"error:{self.error}",
                    "", "", "", "", self.micros]
        return [self.algorithm, self.N, self.seed, self.trial, self.pass_count,
                self.total_switch, self.total_link,
                max(self.switch_occurrences, default=0), max(self.link_occurrences, default=0),
                self.micros]


def evaluate(s: Schedule | None, seed=None, trial=None, micros: int = 0) -> RunMetrics:
    if s is None:
        return RunMetrics("", 0, seed, trial)
    return RunMetrics(
        algorithm=s.algorithm,
        N=s.ms.cfg.size,
        seed=seed,
        trial=trial,
        pass_count=s.pass_count,
        switch_occurrences=[r.switch_count for r in s.reports],
        link_occurrences=[r.link_count for r in s.reports],
        distinct_pairs=[len(r.switch_pairs | r.link_pairs) for r in s.reports],
        micros=micros,
    )


@dataclass
class BenchmarkConfig:
    sizes: list = field(default_factory=lambda: [8])
    trials: int = 1
    seed: int = 0
    algorithms: list = field(default_factory=lambda: list(ALGORITHMS))
    mode: str = "paper"
    # wall-clock timing makes the CSV non-reproducible, so it is opt-in
    timing: bool = False
    workers: int = 1

    def __post_init__(self):
        for N in self.sizes:
            if not isinstance(N, int) or N < 8 or N & (N - 1):
                raise ValueError(f"bench sizes must be powers of two >= 8, got {N!r}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        unknown = set(self.algorithms) - set(ALGORITHMS)
        if unknown:
            raise ValueError(f"unknown algorithms: {sorted(unknown)}")
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")

    def trial_seed(self, N: int, trial: int) -> int:
        return self.seed * 1_000_003 + N * 10_007 + trial


def _run_trial(cfg: BenchmarkConfig, N: int, trial: int) -> list:
    seed = cfg.trial_seed(N, trial)
    ms = random_permutation(N, seed)
    rows = []
    for algo in cfg.algorithms:
        t0 = time.perf_counter_ns()
        try:
            s = schedule(ms, algo, cfg.mode)
        except Exception as exc:  # recorded as a failed row
            rows.append(RunMetrics(algo, N, seed, trial, error=type(exc).__name__))
            continue
        micros = (time.perf_counter_ns() - t0) // 1000 if cfg.timing else 0
        rows.append(evaluate(s, seed, trial, micros))
    return rows


def run_suite(cfg: BenchmarkConfig) -> list:
    tasks = [(N, t) for N in cfg.sizes for t in range(cfg.trials)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            chunks = list(pool.map(_run_trial, [cfg] * len(tasks), *zip(*tasks)))
    else:
        chunks = [_run_trial(cfg, N, t) for N, t in tasks]
    return [row for chunk in chunks for row in chunk]


def write_csv(rows, fh=None) -> str:
    out = fh if fh is not None else io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow(r.csv_row())
    return out.getvalue() if fh is None else ""
