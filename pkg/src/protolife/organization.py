"""Post-hoc analysis of reaction event logs.

Builds the reaction network, tests closure and self-maintenance, classifies
level-0/1/2 organizations, finds catalytic cycles, and detects
self-replicating classes of molecules from instance lineage under a
pluggable equivalence.
"""
from __future__ import annotations

import itertools
import re
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

import networkx as nx

from . import lambda_chem, tile_chem
from .errors import ConfigError, MissingInstanceIds, UnknownSpecies
from .lambda_chem import CollisionLaw, ReductionBudget, Term

Reaction = tuple[tuple[str, ...], tuple[str, ...]]


@dataclass
class ReactionNetwork:
    species: set = field(default_factory=set)
    reactions: dict = field(default_factory=dict)  # (reactants, products) -> count

    def add(self, reactants: Iterable[str], products: Iterable[str], count: int = 1):
        r = (tuple(sorted(reactants)), tuple(sorted(products)))
        self.species.update(r[0])
        self.species.update(r[1])
        self.reactions[r] = self.reactions.get(r, 0) + count

    @classmethod
    def from_rules(cls, rules: Iterable[tuple[Iterable[str], Iterable[str]]]) -> "ReactionNetwork":
        net = cls()
        for lhs, rhs in rules:
            net.add(lhs, rhs)
        return net


def build_network(events) -> ReactionNetwork:
    """Aggregate events into reactions; pass-through (``new=false``) products are dropped."""
    net = ReactionNetwork()
    for ev in events:
        net.species.update(ev.products)
        produced = [k for k, is_new in zip(ev.products, ev.new) if is_new]
        net.add(ev.reactants, produced)
    return net


def _check_subset(s, net):
    unknown = set(s) - net.species
    if unknown:
        raise UnknownSpecies(sorted(unknown))


def is_closed(s: Iterable[str], net: ReactionNetwork) -> bool:
    s = set(s)
    _check_subset(s, net)
    return all(set(prods) <= s for (reacts, prods) in net.reactions if set(reacts) <= s)


def _produced_within(s: set, net: ReactionNetwork) -> set:
    out = set()
    for reacts, prods in net.reactions:
        if set(reacts) <= s:
            out.update(prods)
    return out


def is_self_maintaining(s: Iterable[str], net: ReactionNetwork,
                        externally_produced: Iterable[str] = ()) -> bool:
    """Every member is produced by some reaction whose reactants all lie in ``s``.

    Species in ``externally_produced`` (e.g. the initial population) count
    as produced.
    """
    s = set(s)
    _check_subset(s, net)
    return s <= _produced_within(s, net) | set(externally_produced)


def _generate(seed: set, net: ReactionNetwork) -> set:
    s = set(seed)
    while True:
        grown = s | _produced_within(s, net)
        if grown == s:
            return s
        s = grown


def _prune(s: set, net: ReactionNetwork, external: set) -> set:
    # dropping unproduced species cannot break closure: no reaction inside
    # the smaller set produced them either
    s = set(s)
    while True:
        keep = s & (_produced_within(s, net) | external)
        if keep == s:
            return s
        s = keep


@dataclass
class ReplicatorReport:
    class_id: str
    representative: str
    members: list
    period: int
    witness: list
    equivalence: str
    scale: Optional[int] = None

    def to_dict(self) -> dict:
        d = {"class": self.class_id, "representative": self.representative,
             "members": self.members, "period": self.period, "witness": self.witness,
             "equivalence": self.equivalence}
        if self.scale is not None:
            d["scale"] = self.scale
        return d


@dataclass
class OrganizationReport:
    level0: list
    level1: list
    level2: list

    def to_dict(self) -> dict:
        return {"level0": self.level0, "level1": self.level1, "level2": self.level2}


def classify_organizations(net: ReactionNetwork, replicators: Sequence[ReplicatorReport] = (),
                           externally_produced: Iterable[str] = (),
                           extra_seeds: Iterable[Iterable[str]] = ()) -> OrganizationReport:
    """Level-0: species sets of each replicating class.  Level-1: closed,
    self-maintaining sets grown from the full species set and from every
    level-0 (or extra) seed.  Level-2: disjoint level-1 pairs where each set
    has a member produced with help from the other."""
    external = set(externally_produced)
    level0 = []
    for rep in replicators:
        members = sorted(set(rep.members) & net.species)
        if members and members not in level0:
            level0.append(members)
    level0.sort()

    seeds = [set(net.species)] + [set(m) for m in level0] + [set(s) for s in extra_seeds]
    found = []
    for seed in seeds:
        org = _prune(_generate(seed, net), net, external)
        if org and is_closed(org, net) and sorted(org) not in found:
            found.append(sorted(org))
    found.sort(key=lambda s: (-len(s), s))

    level2 = []
    for s1, s2 in itertools.combinations(found, 2):
        a, b = set(s1), set(s2)
        if a & b:
            continue
        if _helped_by(a, b, net) and _helped_by(b, a, net):
            level2.append([s1, s2])
    return OrganizationReport(level0, found, level2)


def _helped_by(target: set, helper: set, net: ReactionNetwork) -> bool:
    """Some member of ``target`` is produced by a reaction using a ``helper`` reactant."""
    return any(set(prods) & target and set(reacts) & helper
               for reacts, prods in net.reactions)


# -- hypercycles -------------------------------------------------------------


def catalysis_graph(net: ReactionNetwork) -> nx.DiGraph:
    g = nx.DiGraph()
    g.add_nodes_from(sorted(net.species))
    edges = set()
    for reacts, prods in net.reactions:
        for u in set(reacts):
            for v in set(prods) - set(reacts):
                edges.add((u, v))
    g.add_edges_from(sorted(edges))
    return g


def detect_hypercycles(net: ReactionNetwork, max_length: int = 8, max_cycles: int = 1000) -> list:
    """Elementary cycles (length >= 2) of the catalysis graph, each rotated to
    start at its smallest species, sorted by length then lexicographically."""
    g = catalysis_graph(net)
    cycles = []
    for cyc in itertools.islice(nx.simple_cycles(g, length_bound=max_length), max_cycles):
        if len(cyc) < 2:
            continue
        i = cyc.index(min(cyc))
        cycles.append(cyc[i:] + cyc[:i])
    return sorted(cycles, key=lambda c: (len(c), c))


# -- equivalences ------------------------------------------------------------


@dataclass(frozen=True)
class FunctionalProbe:
    probes: tuple
    budget: ReductionBudget = ReductionBudget(1000, 10_000)
    law: Optional[CollisionLaw] = None

    def __post_init__(self):
        if not self.probes:
            raise ConfigError("functional equivalence needs at least one probe")


DEFAULT_PROBES = ("λx.x", "λx.λy.x", "λx.λy.y", "λx.(x)x")
EXHAUSTED = "⊥"


def _apply(f: Term, a: Term, probe: FunctionalProbe) -> str:
    term = lambda_chem.App(f, a)
    if probe.law is not None:
        term = lambda_chem.App(lambda_chem.App(probe.law.phi, f), a)
    res = lambda_chem.normal_form(term, probe.budget)
    return EXHAUSTED if res.exhausted else res.term.key


def functional_signature(term: Term, probe: FunctionalProbe) -> tuple:
    """(nf((t)p), nf((p)t)) for every probe p; exhaustion is its own value."""
    return tuple((_apply(term, p, probe), _apply(p, term, probe)) for p in probe.probes)


def functional_equiv(a: Term, b: Term, probe: FunctionalProbe) -> bool:
    if a.key == b.key:
        return True
    return functional_signature(a, probe) == functional_signature(b, probe)


@dataclass
class EquivalenceSpec:
    kind: str = "exact"  # exact | tileshape | functional
    use_rotations: bool = False
    use_reflections: bool = False
    functional: Optional[FunctionalProbe] = None

    def __post_init__(self):
        if self.kind not in ("exact", "tileshape", "functional"):
            raise ConfigError(f"unknown equivalence {self.kind!r}")
        if self.kind == "functional" and self.functional is None:
            self.functional = FunctionalProbe(tuple(lambda_chem.parse(p) for p in DEFAULT_PROBES))


TILE_KEY = re.compile(r"^[#./]+$")


def infer_chemistry(keys: Iterable[str]) -> Optional[str]:
    """Guess the chemistry that produced a set of species keys (None if empty)."""
    keys = list(keys)
    if not keys:
        return None
    if all(k.startswith("λ") for k in keys):
        return "lambda"
    if all(TILE_KEY.match(k) for k in keys):
        return "tile"
    return "arms"


def make_classifier(eq: EquivalenceSpec, chemistry: Optional[str] = None) -> Callable[[str], str]:
    """Map a species key to its class id under ``eq`` (memoized)."""
    if eq.kind == "tileshape" and chemistry not in (None, "tile"):
        raise ConfigError(f"tile-shape equivalence does not apply to {chemistry} molecules")
    if eq.kind == "functional" and chemistry not in (None, "lambda"):
        raise ConfigError(f"functional equivalence does not apply to {chemistry} molecules")
    cache: dict = {}

    def classify(key: str) -> str:
        if key in cache:
            return cache[key]
        if eq.kind == "exact":
            cid = key
        elif eq.kind == "tileshape":
            cid = tile_chem.shape_class_key(tile_chem.Tile.from_grid(key),
                                            eq.use_rotations, eq.use_reflections)
        else:
            sig = functional_signature(lambda_chem.parse(key), eq.functional)
            cid = ";".join(f"{x}|{y}" for x, y in sig)
        cache[key] = cid
        return cid

    return classify


# -- replicator detection ----------------------------------------------------


@dataclass
class _Lineage:
    reactant_ids: list  # per event
    new_ids: list  # per event
    key_of: dict  # instance id -> species key
    consumers: dict  # instance id -> event indices


def _lineage(events) -> _Lineage:
    reactant_ids, new_ids, key_of = [], [], {}
    consumers = defaultdict(list)
    for idx, ev in enumerate(events):
        if ev.rid is None or ev.pid is None:
            raise MissingInstanceIds(f"event {idx} (t={ev.t}) has no instance ids; "
                                     "record the run with track_instances=true")
        for iid, key in zip(ev.rid, ev.reactants):
            key_of.setdefault(iid, key)
            consumers[iid].append(idx)
        fresh = []
        for iid, key, is_new in zip(ev.pid, ev.products, ev.new):
            key_of.setdefault(iid, key)
            if is_new:
                fresh.append(iid)
        reactant_ids.append(ev.rid)
        new_ids.append(fresh)
    return _Lineage(reactant_ids, new_ids, key_of, consumers)


def detect_replicators(events, eq: EquivalenceSpec = EquivalenceSpec(), max_period: int = 5,
                       chemistry: Optional[str] = None) -> list[ReplicatorReport]:
    """Classes C with a chain e1..ej (j <= max_period) such that a C instance
    is consumed by e1, a new product of each event is consumed by the next,
    and ej makes a new C instance.  Reports the minimal j and one chain."""
    events = list(events)
    lin = _lineage(events)
    if chemistry is None:
        chemistry = infer_chemistry(set(lin.key_of.values()))
    classify = make_classifier(eq, chemistry)
    cls_of = {iid: classify(key) for iid, key in lin.key_of.items()}

    members = defaultdict(set)
    for iid, cid in cls_of.items():
        members[cid].add(lin.key_of[iid])
    produced_classes = {cls_of[i] for ids in lin.new_ids for i in ids}
    sources = defaultdict(list)
    for iid in sorted(lin.consumers):
        sources[cls_of[iid]].append(iid)

    reports = []
    for cid in sorted(produced_classes & set(sources)):
        found = _shortest_chain(cid, sources[cid], lin, cls_of, max_period)
        if found is None:
            continue
        chain, start_iid, end_iid = found
        rep_key = min(members[cid])
        scale = None
        if eq.kind == "tileshape":
            scale = tile_chem.same_shape_ignoring_size(
                tile_chem.Tile.from_grid(lin.key_of[start_iid]),
                tile_chem.Tile.from_grid(lin.key_of[end_iid]),
                eq.use_rotations, eq.use_reflections)
        reports.append(ReplicatorReport(cid, rep_key, sorted(members[cid]), len(chain), chain,
                                        eq.kind, scale))
    return reports


def _shortest_chain(cid, start_ids, lin: _Lineage, cls_of, max_period):
    # multi-source BFS over events; parent[e] = (previous event, instance linking them)
    parent = {}
    frontier = []
    for iid in start_ids:
        for e in lin.consumers[iid]:
            if e not in parent:
                parent[e] = (None, iid)
                frontier.append(e)
    for depth in range(1, max_period + 1):
        frontier.sort()
        for e in frontier:
            for iid in lin.new_ids[e]:
                if cls_of[iid] == cid:
                    chain = [e]
                    while parent[chain[-1]][0] is not None:
                        chain.append(parent[chain[-1]][0])
                    chain.reverse()
                    return chain, parent[chain[0]][1], iid
        if depth == max_period:
            break
        nxt = []
        for e in frontier:
            for iid in lin.new_ids[e]:
                for e2 in lin.consumers.get(iid, ()):
                    if e2 not in parent:
                        parent[e2] = (e, iid)
                        nxt.append(e2)
        frontier = nxt
        if not frontier:
            break
    return None


def verify_witness(events, report: ReplicatorReport, classify: Callable[[str], str]) -> bool:
    """Re-check a witness chain directly against the log."""
    events = list(events)
    chain = report.witness
    if not chain or len(chain) != report.period:
        return False
    evs = [events[i] for i in chain]
    if not any(classify(k) == report.class_id for k in evs[0].reactants):
        return False
    for a, b in zip(evs, evs[1:]):
        fresh = {i for i, is_new in zip(a.pid, a.new) if is_new}
        if not fresh & set(b.rid):
            return False
    last = evs[-1]
    return any(is_new and classify(k) == report.class_id
               for k, is_new in zip(last.products, last.new))
