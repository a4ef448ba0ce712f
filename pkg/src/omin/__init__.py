"""Optical omega network crosstalk analysis and time-domain pass scheduling."""
from .conflict import (
    CombinationMatrix,
    ConflictMatrix,
    ConflictReport,
    MessageSet,
    analyze,
    combination_row,
    iwm_conflict_matrix,
    link_conflicts,
    link_window,
    rsa_conflict_matrix,
    switch_conflicts,
    switch_window,
    window_link_pairs,
    wm_conflict_pairs,
)
from .sched import (
    HeuristicStrategy,
    Schedule,
    asa_schedule,
    greedy_partition,
    heuristic_order,
    rsa_schedule,
    schedule,
)
from .topology import NetworkConfig, Path, route_path, shuffle, simulate_path

__version__ = "0.1.0"
