"""Well-stirred stochastic reactor hosting any of the chemistries.

Each step draws an unordered pair of molecule instances uniformly, lets the
chemistry react them, updates the population and applies outflow.  Events
are written as JSON lines, species counts as CSV rows.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from typing import Optional, TextIO

import numpy as np

from . import arms_chem, config as cfgmod, lambda_chem, tile_chem
from .config import ReactorConfig
from .errors import ConfigError, PopulationUnderflow


# -- chemistries -------------------------------------------------------------


class Chemistry:
    """Interface every chemistry provides to the reactor.

    ``react`` returns the list of new product molecules (empty for an
    elastic collision).  Reactants are kept when ``retain_reactants`` is
    set; otherwise they are consumed by a successful reaction, and also by
    a failed one if ``discard_on_failure`` is set.
    """

    name = ""
    retain_reactants = True
    discard_on_failure = False

    def react(self, a, b, rng) -> list:
        raise NotImplementedError

    def species_key(self, molecule) -> str:
        raise NotImplementedError

    def from_key(self, key: str):
        raise NotImplementedError


class LambdaChemistry(Chemistry):
    name = "lambda"
    retain_reactants = True

    def __init__(self, law: lambda_chem.CollisionLaw = None):
        self.law = law or lambda_chem.CollisionLaw()
        self._cache: dict = {}

    def react(self, a, b, rng=None):
        # alpha-equivalent inputs give alpha-equivalent products, so pairs of
        # species keys are memoized
        k = (a.key, b.key)
        if k not in self._cache:
            self._cache[k] = lambda_chem.collide(a, b, self.law)
        p = self._cache[k]
        return [] if p is None else [p]

    def species_key(self, molecule):
        return molecule.key

    def from_key(self, key):
        return lambda_chem.parse(key)


class TileChemistry(Chemistry):
    name = "tile"
    retain_reactants = False
    discard_on_failure = True

    def __init__(self):
        self._cache: dict = {}

    def react(self, a, b, rng):
        k = (a, b)
        if k not in self._cache:
            self._cache[k] = tile_chem.placements(a, b)
        options = self._cache[k]
        if not options:
            return []
        return [options[int(rng.integers(len(options)))]]

    def species_key(self, molecule):
        return molecule.key

    def from_key(self, key):
        return tile_chem.Tile.from_grid(key)


class ArmsChemistry(Chemistry):
    """Adapter: the whole multiset is one molecule and every rule application
    is a unary event."""

    name = "arms"
    retain_reactants = False

    def __init__(self, rules, stochastic: bool = False):
        self.rules = sorted(rules, key=lambda r: r.rank)
        self.stochastic = stochastic

    def transform(self, state, rng):
        return arms_chem.step(state, self.rules, rng if self.stochastic else None)

    def species_key(self, molecule):
        return molecule.key

    def from_key(self, key):
        return arms_chem.SymbolMultiset.from_text(key)


# -- population --------------------------------------------------------------


class Population:
    """Multiset of species with one exemplar molecule per species.

    Instances are kept in a flat list so that uniform sampling and removal
    are O(1); each instance carries a unique id for lineage tracking.
    """

    def __init__(self):
        self.counts: dict[str, int] = {}
        self.exemplars: dict[str, object] = {}
        self._instances: list[tuple[int, str]] = []
        self._next_id = 0

    @property
    def total(self) -> int:
        return len(self._instances)

    def add(self, key: str, molecule) -> int:
        if key not in self.counts:
            self.counts[key] = 0
            self.exemplars[key] = molecule
        self.counts[key] += 1
        iid = self._next_id
        self._next_id += 1
        self._instances.append((iid, key))
        return iid

    def instance(self, index: int) -> tuple[int, str]:
        return self._instances[index]

    def remove_at(self, index: int) -> tuple[int, str]:
        inst = self._instances[index]
        last = self._instances.pop()
        if index < len(self._instances):
            self._instances[index] = last
        key = inst[1]
        self.counts[key] -= 1
        if self.counts[key] == 0:
            del self.counts[key]
            del self.exemplars[key]
        return inst

    def snapshot(self) -> dict[str, int]:
        return dict(sorted(self.counts.items()))


@dataclass
class ReactionEvent:
    t: int
    reactants: list
    products: list
    new: list
    rid: Optional[list] = None
    pid: Optional[list] = None

    def to_json(self) -> str:
        d = {"t": self.t, "reactants": self.reactants, "products": self.products, "new": self.new}
        if self.rid is not None:
            d["rid"] = self.rid
            d["pid"] = self.pid
        return json.dumps(d, ensure_ascii=False, separators=(",", ":"))

    @classmethod
    def from_dict(cls, d: dict) -> "ReactionEvent":
        return cls(d["t"], d["reactants"], d["products"], d["new"], d.get("rid"), d.get("pid"))


# -- stepping ----------------------------------------------------------------


@dataclass
class StepPolicy:
    outflow: str = "none"
    rate: float = 0.0
    target_size: int = 0
    symmetric_collisions: bool = False
    track_instances: bool = False


def _apply_outflow(pop: Population, policy: StepPolicy, rng) -> None:
    if policy.outflow == "constant_population":
        while pop.total > policy.target_size:
            pop.remove_at(int(rng.integers(pop.total)))
    elif policy.outflow == "rate":
        if pop.total > 0 and rng.random() < policy.rate:
            pop.remove_at(int(rng.integers(pop.total)))


def reactor_step(pop: Population, chem: Chemistry, policy: StepPolicy,
                 rng: np.random.Generator, t: int = 0):
    """One collision.  Mutates ``pop`` in place; returns ``(pop, event or None)``.

    The pair is uniform over unordered pairs of distinct instances.  The
    instance at the lower list position acts as operator unless
    ``symmetric_collisions`` is set, in which case a fair coin orders them.
    """
    n = pop.total
    if n < 2:
        raise PopulationUnderflow(f"population of {n} cannot collide")
    i = int(rng.integers(n))
    j = int(rng.integers(n - 1))
    if j >= i:
        j += 1
    if i > j:
        i, j = j, i
    if policy.symmetric_collisions and rng.random() < 0.5:
        i, j = j, i
    (ia, ka), (ib, kb) = pop.instance(i), pop.instance(j)
    products = chem.react(pop.exemplars[ka], pop.exemplars[kb], rng)
    event = None
    if products:
        if chem.retain_reactants:
            out_keys, new_flags, pids = [ka, kb], [False, False], [ia, ib]
        else:
            for idx in sorted((i, j), reverse=True):
                pop.remove_at(idx)
            out_keys, new_flags, pids = [], [], []
        for m in products:
            key = chem.species_key(m)
            pids.append(pop.add(key, m))
            out_keys.append(key)
            new_flags.append(True)
        event = ReactionEvent(t, [ka, kb], out_keys, new_flags)
        if policy.track_instances:
            event.rid, event.pid = [ia, ib], pids
    elif not chem.retain_reactants and chem.discard_on_failure:
        for idx in sorted((i, j), reverse=True):
            pop.remove_at(idx)
    _apply_outflow(pop, policy, rng)
    return pop, event


# -- building from config ----------------------------------------------------


def build_chemistry(cfg: ReactorConfig, rng: np.random.Generator) -> Chemistry:
    params = cfgmod.chemistry_params(cfg)
    if cfg.chemistry == "lambda":
        try:
            phi = lambda_chem.parse(params.phi)
        except SyntaxError as exc:
            raise ConfigError(f"key 'chemistry_params.phi': {exc}") from exc
        budget = lambda_chem.ReductionBudget(params.max_steps, params.max_nodes)
        return LambdaChemistry(lambda_chem.CollisionLaw(phi, budget))
    if cfg.chemistry == "tile":
        return TileChemistry()
    if params.rules is not None:
        rules = [arms_chem.parse_rule(r, rank) for rank, r in enumerate(params.rules)]
    else:
        rr = params.random_rules
        rules = arms_chem.random_ruleset(rng, arms_chem.RulesetParams(
            rr.n_rules, rr.alphabet_size, rr.max_side_size, rr.target_order_parameter))
    return ArmsChemistry(rules, params.stochastic_rule_choice)


def _parse_molecule(chem: Chemistry, text: str):
    try:
        return chem.from_key(text)
    except (SyntaxError, ValueError) as exc:
        raise ConfigError(f"key 'initial_population.molecules': bad molecule {text!r}: {exc}") from exc


def build_population(cfg: ReactorConfig, chem: Chemistry, rng: np.random.Generator) -> Population:
    init = cfgmod.initial_population(cfg)
    pop = Population()
    if cfg.chemistry == "arms":
        if init.state is not None:
            state = arms_chem.SymbolMultiset.from_text(init.state)
        else:
            state = arms_chem.random_state(rng, init.random.size, init.random.alphabet_size)
        pop.add(state.key, state)
        return pop
    if init.molecules is not None:
        for item in init.molecules:
            m = _parse_molecule(chem, item.molecule)
            for _ in range(item.count):
                pop.add(chem.species_key(m), m)
        return pop
    r = init.random
    if cfg.chemistry == "tile":
        for _ in range(r.count):
            m = tile_chem.random_tile(rng, int(rng.integers(r.min_area, r.max_area + 1)))
            pop.add(m.key, m)
        return pop
    params = lambda_chem.RandomTermParams(r.max_depth, r.var_pool_size, r.p_var,
                                          r.p_abs, r.p_app, r.closed)
    attempts = 0
    while pop.total < r.count:
        attempts += 1
        if attempts > r.max_attempts:
            raise ConfigError("key 'initial_population.random': too few normal-form "
                              "abstractions generated; raise max_attempts or p_abs")
        t = lambda_chem.random_term(rng, params)
        # only normal forms that can act as operators enter the reactor
        if isinstance(t, lambda_chem.Lam) and not t.redex:
            pop.add(t.key, t)
    return pop


# -- running -----------------------------------------------------------------


@dataclass
class RunResult:
    population: Population
    initial_counts: dict
    steps: int
    events: int
    outcome: str
    chemistry: Chemistry = field(repr=False, default=None)


def _write_sample(writer, t, pop):
    if writer is not None:
        for key, n in pop.snapshot().items():
            writer.writerow([t, key, n])


def run(cfg: ReactorConfig, event_sink: Optional[TextIO] = None,
        series_sink: Optional[TextIO] = None) -> RunResult:
    """Execute ``cfg.max_steps`` steps (fewer on underflow or ARMS termination).

    Same config and seed give byte-identical sink contents.
    """
    rng = np.random.default_rng(cfg.seed)
    chem = build_chemistry(cfg, rng)
    pop = build_population(cfg, chem, rng)
    initial = pop.snapshot()
    writer = None
    if series_sink is not None:
        writer = csv.writer(series_sink, lineterminator="\n")
        writer.writerow(["t", "species_key", "count"])
    _write_sample(writer, 0, pop)
    if cfg.chemistry == "arms":
        return _run_arms(cfg, chem, pop, rng, event_sink, writer, initial)

    outflow = cfg.resolved_outflow()
    policy = StepPolicy(outflow, cfg.outflow.p, pop.total, cfg.symmetric_collisions,
                        cfg.track_instances)
    n_events = 0
    outcome = "completed"
    steps = 0
    for t in range(1, cfg.max_steps + 1):
        try:
            _, event = reactor_step(pop, chem, policy, rng, t)
        except PopulationUnderflow:
            outcome = "underflow"
            break
        steps = t
        if event is not None:
            n_events += 1
            if event_sink is not None:
                event_sink.write(event.to_json() + "\n")
        if t % cfg.sample_every == 0:
            _write_sample(writer, t, pop)
    if steps % cfg.sample_every != 0:
        _write_sample(writer, steps, pop)
    return RunResult(pop, initial, steps, n_events, outcome, chem)


def _run_arms(cfg, chem: ArmsChemistry, pop, rng, event_sink, writer, initial):
    # one molecule holding the whole multiset; stop on termination or recurrence
    seen = {pop.instance(0)[1]}
    outcome = "completed"
    steps = 0
    for t in range(1, cfg.max_steps + 1):
        iid, key = pop.instance(0)
        nxt = chem.transform(pop.exemplars[key], rng)
        if nxt is None:
            outcome = "terminated"
            break
        state, _rank = nxt
        pop.remove_at(0)
        new_id = pop.add(state.key, state)
        steps = t
        event = ReactionEvent(t, [key], [state.key], [True])
        if cfg.track_instances:
            event.rid, event.pid = [iid], [new_id]
        if event_sink is not None:
            event_sink.write(event.to_json() + "\n")
        if t % cfg.sample_every == 0:
            _write_sample(writer, t, pop)
        if state.key in seen:
            outcome = "cycle"
            break
        seen.add(state.key)
    if steps % cfg.sample_every != 0:
        _write_sample(writer, steps, pop)
    return RunResult(pop, initial, steps, steps, outcome, chem)


# -- log utilities -----------------------------------------------------------


def read_events(lines) -> list[ReactionEvent]:
    from .errors import MalformedLog

    events = []
    for lineno, line in enumerate(lines, 1):
        line = line.strip()
        if not line:
            continue
        try:
            d = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedLog(f"invalid JSON: {exc}", lineno) from exc
        if not isinstance(d, dict):
            raise MalformedLog("event must be an object", lineno)
        for k, typ in (("t", int), ("reactants", list), ("products", list), ("new", list)):
            if not isinstance(d.get(k), typ):
                raise MalformedLog(f"missing or malformed field '{k}'", lineno)
        if len(d["new"]) != len(d["products"]):
            raise MalformedLog("'new' and 'products' differ in length", lineno)
        if ("rid" in d) != ("pid" in d):
            raise MalformedLog("'rid' and 'pid' must appear together", lineno)
        if "rid" in d and (len(d["rid"]) != len(d["reactants"]) or len(d["pid"]) != len(d["products"])):
            raise MalformedLog("instance id arrays do not match reactants/products", lineno)
        if events and d["t"] < events[-1].t:
            raise MalformedLog("event times decrease", lineno)
        events.append(ReactionEvent.from_dict(d))
    return events


def replay(initial_counts: dict, events) -> dict:
    """Fold events over the initial counts: reactants out, products in."""
    counts = dict(initial_counts)
    for ev in events:
        for k in ev.reactants:
            counts[k] = counts.get(k, 0) - 1
            if counts[k] < 0:
                raise ValueError(f"event at t={ev.t} consumes absent species {k!r}")
        for k in ev.products:
            counts[k] = counts.get(k, 0) + 1
    return dict(sorted((k, n) for k, n in counts.items() if n))
