"""Entropy and mutual information in bits, plus a
compression-based upper bound on algorithmic information."""
from __future__ import annotations

import math
from collections import defaultdict
from typing import Hashable, Mapping

from . import lzcodec
from .errors import ArityError, EmptyPopulation, InvalidDistribution

TOL = 1e-9


def _check(probs: Mapping) -> None:
    total = 0.0
    for outcome, p in probs.items():
        if not math.isfinite(p) or p < 0:
            raise InvalidDistribution(f"bad probability {p!r} for {outcome!r}")
        total += p
    if abs(total - 1.0) > TOL:
        raise InvalidDistribution(f"probabilities sum to {total!r}, not 1")


def _h(probs) -> float:
    # p log p is taken as 0 when p = 0
    # the + 0.0 turns a -0.0 from a single certain outcome into 0.0
    return -sum(p * math.log2(p) for p in probs if p > 0) + 0.0


def entropy(dist: Mapping[Hashable, float]) -> float:
    _check(dist)
    return _h(dist.values())


def joint_entropy(joint: Mapping[tuple, float]) -> float:
    _check(joint)
    return _h(joint.values())


def marginal(joint: Mapping[tuple, float], axis: int) -> dict:
    out: dict = defaultdict(float)
    for outcome, p in joint.items():
        out[outcome[axis]] += p
    return dict(out)


def mutual_information(joint: Mapping[tuple, float]) -> float:
    """I(X;Y) = H(X) + H(Y) - H(X,Y) for a bivariate joint distribution."""
    _check(joint)
    for outcome in joint:
        if not isinstance(outcome, tuple) or len(outcome) != 2:
            raise ArityError(f"expected (x, y) outcomes, got {outcome!r}")
    mi = (_h(marginal(joint, 0).values()) + _h(marginal(joint, 1).values())
          - _h(joint.values()))
    if mi < 0:
        if mi < -1e-12:
            raise ArithmeticError(f"mutual information {mi!r} is negative beyond rounding")
        mi = 0.0
    return mi


def distribution_from_counts(counts: Mapping[Hashable, int]) -> dict:
    total = sum(counts.values())
    if total <= 0:
        raise EmptyPopulation("no molecules to form a distribution from")
    return {k: n / total for k, n in counts.items() if n > 0}


def population_entropy(population) -> float:
    """Entropy of the species frequencies of a population or a count mapping."""
    counts = getattr(population, "counts", population)
    return _h(distribution_from_counts(counts).values())


def algorithmic_info_proxy(payload: bytes) -> int:
    """Bits in the compressed form of ``payload``; an upper bound, never below 32."""
    return 8 * len(lzcodec.compress(payload))
