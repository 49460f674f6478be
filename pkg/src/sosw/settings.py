# src/sosw/settings.py

"""
Search bounds and defaults shared by every engine module.

All bounded searches take a Bounds value instead of loose integers so the
CLI can override them in one place (--depth etc.).
"""

from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Bounds:
    proof_depth: int = 6            # ruloid / linear proof search
    resolution_rounds: int = 6      # premise resolution towards xynft
    universe_depth: int = 3         # BFS depth for LTS generation
    subset_cap: int = 2 ** 12       # M-subsets in manifest delay resistance
    blowup_cap: int = 4096          # choice product when denying premises
    oracle_cap: int = 12            # states accepted by the naive oracle
    decomposition_rounds: int = 64  # Kleene rounds per formula stratum
    context_depth: int = 1          # congruence harness contexts
    seed: int = 0

    def with_overrides(self, **overrides) -> "Bounds":
        clean = {k: v for k, v in overrides.items() if v is not None}
        return replace(self, **clean)


DEFAULT_BOUNDS = Bounds()
