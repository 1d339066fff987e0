"""Ordered multiset rewriting (ARMS-style) over abstract symbols.

A ruleset is a list of rules ``lhs -> rhs`` over symbol multisets, tried in
rank order.  Heating rules grow the multiset, cooling rules shrink it.  The
order parameter is the heating share among non-neutral rules; random
rulesets at intermediate values are the ones that produce cycling
trajectories.
"""
from __future__ import annotations

import csv
import enum
import io
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence, Union

import numpy as np

from .errors import ConfigError, DegenerateRuleset


class SymbolMultiset:
    """Immutable, hashable multiset of symbols."""

    __slots__ = ("_items", "_counts", "_hash", "size")

    def __init__(self, counts: Union[Mapping[str, int], Iterable[str]] = ()):
        if isinstance(counts, Mapping):
            raw = dict(counts)
        else:
            raw = Counter(counts)
        for sym, n in raw.items():
            if not isinstance(sym, str) or not sym or any(c.isspace() for c in sym):
                raise ValueError(f"invalid symbol {sym!r}")
            if n < 0:
                raise ValueError(f"negative count for {sym!r}")
        self._counts = {s: int(n) for s, n in sorted(raw.items()) if n > 0}
        self._items = tuple(self._counts.items())
        self._hash = hash(self._items)
        self.size = sum(self._counts.values())

    @classmethod
    def from_text(cls, text: str) -> "SymbolMultiset":
        return cls(text.split())

    def __getitem__(self, sym):
        return self._counts.get(sym, 0)

    def __iter__(self):
        return iter(self._counts)

    def __len__(self):
        return len(self._counts)

    def items(self):
        return self._items

    def as_dict(self) -> dict[str, int]:
        return dict(self._counts)

    def __eq__(self, other):
        if not isinstance(other, SymbolMultiset):
            return NotImplemented
        return self._items == other._items

    def __hash__(self):
        return self._hash

    def includes(self, other: "SymbolMultiset") -> bool:
        return all(self._counts.get(s, 0) >= n for s, n in other._items)

    def __add__(self, other):
        c = dict(self._counts)
        for s, n in other._items:
            c[s] = c.get(s, 0) + n
        return SymbolMultiset(c)

    def __sub__(self, other):
        if not self.includes(other):
            raise ValueError("multiset difference would go negative")
        c = dict(self._counts)
        for s, n in other._items:
            c[s] -= n
        return SymbolMultiset(c)

    @property
    def key(self) -> str:
        """Space-separated symbols, sorted; the empty multiset is ``""``."""
        return " ".join(s for s, n in self._items for _ in range(n))

    def __str__(self):
        return "{" + ", ".join(f"{s}:{n}" for s, n in self._items) + "}"

    __repr__ = __str__


@dataclass(frozen=True)
class ArmsRule:
    lhs: SymbolMultiset
    rhs: SymbolMultiset
    rank: int = 0

    def __post_init__(self):
        if self.lhs.size < 1:
            raise ValueError("rule left side must be nonempty")
        if self.rank < 0:
            raise ValueError("rule rank must be non-negative")

    def __str__(self):
        return f"{self.lhs.key} -> {self.rhs.key}".rstrip()


def parse_rule(line: str, rank: int = 0) -> ArmsRule:
    if "->" not in line:
        raise ConfigError(f"rule {line!r} has no '->'")
    left, right = line.split("->", 1)
    return ArmsRule(SymbolMultiset.from_text(left), SymbolMultiset.from_text(right), rank)


def parse_ruleset(text: str) -> list[ArmsRule]:
    """One rule per line, ranked by line order; blank lines and ``#`` comments skipped."""
    rules = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            rules.append(parse_rule(line, rank=len(rules)))
    return rules


def format_ruleset(rules: Sequence[ArmsRule]) -> str:
    return "".join(f"{r}\n" for r in sorted(rules, key=lambda r: r.rank))


def apply_rule(state: SymbolMultiset, rule: ArmsRule) -> Optional[SymbolMultiset]:
    if not state.includes(rule.lhs):
        return None
    return state - rule.lhs + rule.rhs


def step(state: SymbolMultiset, rules: Sequence[ArmsRule],
         rng: Optional[np.random.Generator] = None):
    """Apply one rule; returns ``(new_state, rank)`` or None when nothing applies.

    Without ``rng`` the lowest-rank applicable rule fires.  With ``rng`` the
    rule is drawn uniformly among the applicable ones.
    """
    if rng is None:
        for rule in rules:
            if state.includes(rule.lhs):
                return state - rule.lhs + rule.rhs, rule.rank
        return None
    applicable = [r for r in rules if state.includes(r.lhs)]
    if not applicable:
        return None
    rule = applicable[int(rng.integers(len(applicable)))]
    return state - rule.lhs + rule.rhs, rule.rank


class RuleKind(enum.Enum):
    HEATING = "heating"
    COOLING = "cooling"
    NEUTRAL = "neutral"


def classify_rule(rule: ArmsRule) -> RuleKind:
    if rule.lhs.size < rule.rhs.size:
        return RuleKind.HEATING
    if rule.lhs.size > rule.rhs.size:
        return RuleKind.COOLING
    return RuleKind.NEUTRAL


def order_parameter(rules: Iterable[ArmsRule]) -> float:
    kinds = Counter(classify_rule(r) for r in rules)
    h, c = kinds[RuleKind.HEATING], kinds[RuleKind.COOLING]
    if h + c == 0:
        raise DegenerateRuleset("ruleset has no heating or cooling rules")
    return h / (h + c)


def alphabet(size: int) -> list[str]:
    if size <= 26:
        return [chr(ord("a") + i) for i in range(size)]
    return [f"s{i}" for i in range(size)]


@dataclass(frozen=True)
class RulesetParams:
    n_rules: int = 6
    alphabet_size: int = 3
    max_side_size: int = 3
    target_order_parameter: float = 0.5


def _random_side(rng, symbols, size):
    return SymbolMultiset(symbols[i] for i in rng.integers(len(symbols), size=size))


def random_ruleset(rng: np.random.Generator, params: RulesetParams) -> list[ArmsRule]:
    """Random heating and cooling rules hitting the target order parameter.

    The number of heating rules is the target times ``n_rules``, rounded
    half up, so the realized order parameter is within ``1/(2 n_rules)``.
    No neutral rules are generated.
    """
    n, rho, m = params.n_rules, params.target_order_parameter, params.max_side_size
    if n < 1:
        raise ConfigError("n_rules must be >= 1")
    if not 0.0 <= rho <= 1.0:
        raise ConfigError(f"target_order_parameter must lie in [0, 1], got {rho!r}")
    if m < 1 or params.alphabet_size < 1:
        raise ConfigError("max_side_size and alphabet_size must be >= 1")
    n_heat = int(np.floor(rho * n + 0.5))
    if n_heat > 0 and m < 2:
        raise ConfigError("heating rules need max_side_size >= 2; target unreachable")
    kinds = np.array([True] * n_heat + [False] * (n - n_heat))
    kinds = kinds[rng.permutation(n)]
    symbols = alphabet(params.alphabet_size)
    rules = []
    for rank, heating in enumerate(kinds):
        if heating:
            lsize = int(rng.integers(1, m))
            rsize = int(rng.integers(lsize + 1, m + 1))
        else:
            lsize = int(rng.integers(1, m + 1))
            rsize = int(rng.integers(0, lsize))
        rules.append(ArmsRule(_random_side(rng, symbols, lsize),
                              _random_side(rng, symbols, rsize), rank))
    return rules


# -- trajectories ------------------------------------------------------------


@dataclass(frozen=True)
class Terminated:
    pass


@dataclass(frozen=True)
class Cycle:
    entry_index: int
    period: int


@dataclass(frozen=True)
class BudgetExhausted:
    pass


@dataclass
class ArmsTrajectory:
    states: list
    outcome: Union[Terminated, Cycle, BudgetExhausted]
    ranks: list


def run_arms(initial: SymbolMultiset, rules: Sequence[ArmsRule], max_steps: int,
             rng: Optional[np.random.Generator] = None) -> ArmsTrajectory:
    """Iterate ``step`` until no rule applies or a state recurs, at most ``max_steps`` times.

    On a recurrence the repeated state is appended, so for ``Cycle(i, p)``
    ``states[i] == states[i + p]``.  With ``rng`` (stochastic rule choice) a
    recurrence is reported the same way, though it no longer implies the
    trajectory stays on the cycle.
    """
    if max_steps < 1:
        raise ConfigError("max_steps must be >= 1")
    rules = sorted(rules, key=lambda r: r.rank)
    states = [initial]
    ranks = []
    seen = {initial: 0}
    state = initial
    for _ in range(max_steps):
        nxt = step(state, rules, rng)
        if nxt is None:
            return ArmsTrajectory(states, Terminated(), ranks)
        state, rank = nxt
        states.append(state)
        ranks.append(rank)
        i = seen.get(state)
        if i is not None:
            assert states[i] == state
            return ArmsTrajectory(states, Cycle(i, len(states) - 1 - i), ranks)
        seen[state] = len(states) - 1
    return ArmsTrajectory(states, BudgetExhausted(), ranks)


# -- order-parameter sweep ---------------------------------------------------


@dataclass(frozen=True)
class SweepParams:
    n_rules: int = 6
    alphabet_size: int = 3
    max_side_size: int = 3
    initial_size: int = 4
    max_steps: int = 500
    stochastic_rule_choice: bool = False


@dataclass(frozen=True)
class SweepRow:
    target: float
    cycling: float
    terminated: float
    exhausted: float


def random_state(rng: np.random.Generator, size: int, alphabet_size: int) -> SymbolMultiset:
    return _random_side(rng, alphabet(alphabet_size), size)


def run_rng(seed: int, grid_index: int, run_index: int) -> np.random.Generator:
    """Independent stream per (seed, grid point, run) so runs are order-free."""
    return np.random.default_rng([seed, grid_index, run_index])


def _one_run(args):
    seed, gi, ri, target, p = args
    rng = run_rng(seed, gi, ri)
    rules = random_ruleset(rng, RulesetParams(p.n_rules, p.alphabet_size,
                                              p.max_side_size, target))
    init = random_state(rng, p.initial_size, p.alphabet_size)
    traj = run_arms(init, rules, p.max_steps, rng if p.stochastic_rule_choice else None)
    return gi, type(traj.outcome).__name__


def sweep(seed: int, grid: Sequence[float], runs_per_point: int,
          params: SweepParams = SweepParams(), workers: int = 1) -> list[SweepRow]:
    if not grid:
        raise ConfigError("sweep grid is empty")
    if runs_per_point < 1:
        raise ConfigError("runs_per_point must be >= 1")
    jobs = [(seed, gi, ri, float(t), params)
            for gi, t in enumerate(grid) for ri in range(runs_per_point)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_one_run, jobs, chunksize=32))
    else:
        results = [_one_run(j) for j in jobs]
    tallies = [Counter() for _ in grid]
    for gi, outcome in results:
        tallies[gi][outcome] += 1
    return [SweepRow(float(t), c["Cycle"] / runs_per_point, c["Terminated"] / runs_per_point,
                     c["BudgetExhausted"] / runs_per_point)
            for t, c in zip(grid, tallies)]


def sweep_csv(rows: Iterable[SweepRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["target", "cycling", "terminated", "exhausted"])
    for r in rows:
        w.writerow([format(v, ".17g") for v in (r.target, r.cycling, r.terminated, r.exhausted)])
    return buf.getvalue()
