"""Pattern discovery: pairwise alignment mining over a team's possessions."""

from pass_patterns.discovery.matcher import (
    admissible,
    check_match,
    complete_pass_filter,
    find_matches,
    local_distance,
    pair_distances,
)
from pass_patterns.discovery.model import DiscoveryResult, MatchParams, PatternMatch, Segment
from pass_patterns.discovery.oracle import brute_force_oracle
from pass_patterns.discovery.team import discover_team

__all__ = [
    "DiscoveryResult",
    "MatchParams",
    "PatternMatch",
    "Segment",
    "admissible",
    "brute_force_oracle",
    "check_match",
    "complete_pass_filter",
    "discover_team",
    "find_matches",
    "local_distance",
    "pair_distances",
]
