"""
Rate constants of the multi-soliton estimate.

omega_star = min_j I_j / 256 with I_j = (1 - c_j^2 - omega_j^2) / (1 - c_j^2)^2,
c_star = min_{j != k} |c_j - c_k|.
"""

import math
from itertools import combinations
from typing import Dict, Sequence, Tuple

from ..exceptions import ParameterError
from ..solitons import SolitonSpec, check_distinct_speeds


def omega_star(specs: Sequence[SolitonSpec]) -> float:
    if not specs:
        raise ParameterError("omega_star needs at least one soliton")
    return min(spec.big_i for spec in specs) / 256.0


def theorem_constants(specs: Sequence[SolitonSpec]) -> Tuple[float, float]:
    """(omega_star, c_star); needs two or more solitons with distinct speeds."""
    if len(specs) < 2:
        raise ParameterError("c_star is undefined for fewer than two solitons")
    check_distinct_speeds(specs)
    c_star = min(abs(a.c - b.c) for a, b in combinations(specs, 2))
    return omega_star(specs), c_star


def envelopes(t: float, w_star: float, c_star: float) -> Dict[str, float]:
    """Main bound and the two alternative scalings logged next to it."""
    root = math.sqrt(w_star)
    return {
        'bound': math.exp(-root * c_star * t),
        'env_omega32': math.exp(-w_star ** 1.5 * t),
        'env_3root': math.exp(-3.0 * root * t),
    }
