"""Omega network wiring and destination-tag routing.

Lines are numbered 0..N-1. Every stage is preceded by a perfect shuffle
(left circular rotation of the n-bit line number); the 2x2 switch at
stage k then sets the low bit of the line to bit k of the destination,
most significant bit first.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple


@dataclass(frozen=True)
class NetworkConfig:
    size: int
    stages: int = field(init=False)

    def __post_init__(self):
        n = self.size
        if not isinstance(n, int) or n < 4 or n & (n - 1):
            raise ValueError(f"network size must be a power of two >= 4, got {n!r}")
        object.__setattr__(self, "stages", n.bit_length() - 1)

    @property
    def switches_per_stage(self) -> int:
        return self.size // 2

    def check(self, addr: int) -> int:
        if not isinstance(addr, int) or not 0 <= addr < self.size:
            raise ValueError(f"address {addr!r} out of range for N={self.size}")
        return addr

    def bits(self, addr: int) -> str:
        return format(self.check(addr), f"0{self.stages}b")


class Path(NamedTuple):
    # links[b]: line at boundary b (0 = input, n = output)
    links: tuple
    # switches[k]: (stage, switch index)
    switches: tuple


def shuffle(a: int, cfg: NetworkConfig) -> int:
    cfg.check(a)
    n = cfg.stages
    return ((a << 1) | (a >> (n - 1))) & (cfg.size - 1)


def unshuffle(a: int, cfg: NetworkConfig) -> int:
    cfg.check(a)
    n = cfg.stages
    return (a >> 1) | ((a & 1) << (n - 1))


def route_path(s: int, d: int, cfg: NetworkConfig) -> Path:
    """Path of the message s -> d, read off the sliding windows of s||d.

    With C the 2n-bit concatenation of source and destination, the line
    at boundary b is C[b .. b+n-1] and the switch used at stage k is
    C[k+1 .. k+n-1].
    """
    cfg.check(s)
    cfg.check(d)
    n, N = cfg.stages, cfg.size
    c = (s << n) | d
    links = tuple((c >> (n - b)) & (N - 1) for b in range(n + 1))
    switches = tuple((k, (c >> (n - k)) & (N // 2 - 1)) for k in range(n))
    return Path(links, switches)


def simulate_path(s: int, d: int, cfg: NetworkConfig) -> Path:
    """Stage-by-stage walk: shuffle, pick the switch, exchange to the tag bit."""
    cfg.check(d)
    n = cfg.stages
    line = cfg.check(s)
    links = [line]
    switches = []
    for k in range(n):
        line = shuffle(line, cfg)
        switches.append((k, line >> 1))
        tag = (d >> (n - 1 - k)) & 1
        line = (line & ~1) | tag
        links.append(line)
    return Path(tuple(links), tuple(switches))
