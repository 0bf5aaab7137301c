"""Structural shortcuts for conditional queries.

The interaction graph joins every pair of variables that share a component
support. Disconnected parts of a distribution have a product partition
function; after projecting on evidence only the target's part matters (its
Markov blanket); and a small vertex separator can be summed out explicitly
to make the rest fall apart.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterable, Sequence

import networkx as nx

from .algebra import Row, VariableSet, select_columns, support
from .distribution import (
    Distribution,
    EvidenceRow,
    Factor,
    PartitionValue,
    QueryResult,
    WeightedComponent,
    conditional_probability,
    delta,
    free_columns,
    normalized,
    partition,
    project,
    sum_masses,
    target_column,
)
from .errors import ResourceLimitError, UsageError

SEPARATOR_CAP = 20
AUTO_BLANKET_THRESHOLD = 24
STRATEGIES = ("direct", "blanket", "separator", "auto")


@dataclass(frozen=True)
class InteractionGraph:
    vertices: frozenset
    edges: frozenset  # of (i, j) with i < j

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(sorted(self.vertices))
        g.add_edges_from(sorted(self.edges))
        return g

    def components(self) -> list[frozenset]:
        """Connected components, ordered by smallest vertex."""
        comps = [frozenset(c) for c in nx.connected_components(self.to_networkx())]
        return sorted(comps, key=min)

    def relabel(self, mapping: Sequence[int]) -> "InteractionGraph":
        return InteractionGraph(
            frozenset(mapping[v] for v in self.vertices),
            frozenset(tuple(sorted((mapping[a], mapping[b]))) for a, b in self.edges),
        )


def build_graph(d: Distribution) -> InteractionGraph:
    """One clique per component support; variables in no support are left out."""
    vertices: set[int] = set()
    edges: set[tuple[int, int]] = set()
    for c in d.components:
        supp = sorted(support(c.states))
        vertices.update(supp)
        edges.update(itertools.combinations(supp, 2))
    return InteractionGraph(frozenset(vertices), frozenset(edges))


@dataclass
class FactorizationPlan:
    """Independent parts of a distribution.

    Each entry of ``components`` pairs a variable set with the part of the
    distribution living on it, restricted to those columns (ascending) and
    with unit base. The base factor and the volume of the uncovered
    variables are kept on the plan.
    """

    width: int
    base: Factor
    log2_scale: int
    components: list[tuple[VariableSet, Distribution]]
    separator: VariableSet | None = None
    target_component_index: int | None = None

    @property
    def covered(self) -> int:
        return sum(len(vs) for vs, _ in self.components)

    def partition(self) -> PartitionValue:
        """``base * 2**(N - covered) * prod_i Z_i``."""
        total = PartitionValue(self.base.psi, self.log2_scale + self.width - self.covered)
        for _, sub in self.components:
            total = total * partition(sub)
        return total

    def sizes(self) -> list[int]:
        return [len(vs) for vs, _ in self.components]


def split_components(d: Distribution) -> FactorizationPlan:
    graph = build_graph(d)
    groups = graph.components()
    owner = {v: k for k, vs in enumerate(groups) for v in vs}
    buckets: list[list[WeightedComponent]] = [[] for _ in groups]
    for c in d.components:
        supp = support(c.states)
        if not supp:
            # a component equal to the whole space only rescales the base
            continue
        buckets[owner[min(supp)]].append(c)
    base = d.base.psi
    for c in d.components:
        if not support(c.states):
            base *= c.factor.psi
    parts = []
    for vs, comps in zip(groups, buckets):
        cols = sorted(vs)
        sub = Distribution(
            len(cols),
            Factor(1.0),
            tuple(WeightedComponent(select_columns(c.states, cols), c.factor) for c in comps),
        )
        parts.append((vs, sub))
    return FactorizationPlan(d.width, Factor(base), d.log2_scale, parts)


def factorized_partition(d: Distribution) -> PartitionValue:
    return split_components(d).partition()


def _to_original(e: EvidenceRow) -> list[int]:
    return free_columns(e)


def markov_blanket_query(d: Distribution, e: EvidenceRow, target: int) -> QueryResult:
    """Conditional of ``target`` computed from its own component of ``e ^ d``.

    The other components contribute the same factor to both target
    polarities and cancel. Reported masses are those of the target
    component over the full free space of ``e``.
    """
    col = target_column(e, target)
    eta = project(d, e)
    plan = split_components(eta)
    original = _to_original(e)
    index = next((k for k, (vs, _) in enumerate(plan.components) if col in vs), None)
    plan.target_component_index = index
    if index is None:
        vs: frozenset = frozenset([col])
        sub = Distribution(1)
    else:
        vs, sub = plan.components[index]
    cols = sorted(vs)
    local = cols.index(col)
    # restricted masses scaled back to the full free space minus the target
    extra = eta.width - len(cols) + eta.log2_scale
    base = eta.base.psi
    m1 = partition(project(sub, delta(sub.width, local, 1))).scaled(extra) * base
    m0 = partition(project(sub, delta(sub.width, local, 0))).scaled(extra) * base
    blanket = sorted(original[v] for v in vs if v != col)
    diagnostics = {
        "strategy": "blanket",
        "blanket": blanket,
        "components": [sorted(original[v] for v in c) for c, _ in plan.components],
        "component_sizes": plan.sizes(),
        "separator": None,
        "summation_terms": 1,
    }
    return QueryResult(normalized(m1, m0), m1, m0, "blanket", eta.width, diagnostics)


def _disconnects(g: nx.Graph, removed: Iterable[int]) -> bool:
    h = g.copy()
    h.remove_nodes_from(removed)
    return h.number_of_nodes() > 0 and nx.number_connected_components(h) >= 2


def _largest_after(g: nx.Graph, removed: Iterable[int]) -> tuple[int, int]:
    h = g.copy()
    h.remove_nodes_from(removed)
    comps = [len(c) for c in nx.connected_components(h)]
    return len(comps), max(comps, default=0)


def find_separator(
    g: InteractionGraph, max_size: int, exclude: Iterable[int] = (), seed: int = 0
) -> VariableSet | None:
    """Heuristic vertex separator of at most ``max_size`` vertices.

    An already disconnected graph needs no separator (empty set). Otherwise
    the articulation point leaving the smallest largest component wins;
    failing that, vertices are removed greedily (best balance first, ties
    broken by a ``seed``-shuffled order) until the graph falls apart, and
    the set is then pruned of members it does not need. ``exclude`` lists
    vertices that may not be chosen.
    """
    if max_size < 1:
        raise UsageError("max_size must be at least 1")
    banned = set(exclude)
    graph = g.to_networkx()
    if graph.number_of_nodes() == 0:
        return None
    if nx.number_connected_components(graph) >= 2:
        return frozenset()

    arts = sorted(set(nx.articulation_points(graph)) - banned)
    if arts:
        best = min(arts, key=lambda v: (_largest_after(graph, [v])[1], v))
        return frozenset([best])
    if max_size == 1:
        return None

    rng = random.Random(seed)
    chosen: list[int] = []
    work = graph.copy()
    while len(chosen) < max_size:
        candidates = sorted(v for v in work.nodes if v not in banned)
        if not candidates or work.number_of_nodes() <= 2:
            return None
        rng.shuffle(candidates)

        def score(v):
            n_comps, largest = _largest_after(work, [v])
            return (n_comps < 2, largest, -work.degree(v))

        best = min(candidates, key=score)
        chosen.append(best)
        work.remove_node(best)
        if work.number_of_nodes() > 0 and nx.number_connected_components(work) >= 2:
            break
    else:
        return None

    for v in list(chosen):
        trial = [u for u in chosen if u != v]
        if trial and _disconnects(graph, trial):
            chosen = trial
    return frozenset(chosen)


def separator_query(
    d: Distribution,
    e: EvidenceRow,
    target: int,
    sep: Iterable[int],
    cap: int = SEPARATOR_CAP,
) -> QueryResult:
    """Sum the factorized masses over every assignment of ``sep``.

    ``P = sum_a Z(e a d1) / (sum_a Z(e a d1) + sum_a Z(e a d0))`` with the
    assignments ``a`` in lexicographic order and every inner mass computed
    from the independent parts of ``(e a) ^ d``.
    """
    sep_vars = sorted(set(sep))
    target_column(e, target)
    for v in sep_vars:
        if not 0 <= v < d.width:
            raise UsageError(f"separator variable index {v} out of range")
        if (e.care >> v) & 1:
            raise UsageError(f"separator variable X{v + 1} is evidenced")
        if v == target:
            raise UsageError("the target cannot be part of the separator")
    if len(sep_vars) > cap:
        raise ResourceLimitError(f"separator of size {len(sep_vars)} exceeds the cap of {cap}")
    if not sep_vars:
        result = markov_blanket_query(d, e, target)
        result.strategy = "separator"
        result.diagnostics.update(strategy="separator", separator=[], summation_terms=1)
        return result

    masses = {0: [], 1: []}
    sizes = []
    for bits in itertools.product((0, 1), repeat=len(sep_vars)):
        care, value = e.care, e.value
        for v, b in zip(sep_vars, bits):
            care |= 1 << v
            value |= b << v
        for t in (0, 1):
            row = Row(d.width, care | (1 << target), value | (t << target))
            plan = split_components(project(d, row))
            masses[t].append(plan.partition())
            if t == 1 and not sizes:
                sizes = plan.sizes()
    m1 = sum_masses(masses[1])
    m0 = sum_masses(masses[0])
    free_width = d.width - bin(e.care).count("1")
    diagnostics = {
        "strategy": "separator",
        "blanket": None,
        "component_sizes": sizes,
        "separator": sep_vars,
        "summation_terms": 1 << len(sep_vars),
    }
    return QueryResult(normalized(m1, m0), m1, m0, "separator", free_width, diagnostics)


def _target_component_graph(d: Distribution, e: EvidenceRow, target: int):
    """Interaction graph of the target's component after projection (original ids)."""
    col = target_column(e, target)
    eta = project(d, e)
    original = free_columns(e)
    graph = build_graph(eta)
    comp = next((c for c in graph.components() if col in c), frozenset([col]))
    sub = InteractionGraph(
        frozenset(comp), frozenset(edge for edge in graph.edges if edge[0] in comp)
    )
    return sub.relabel(original)


def choose_separator(
    d: Distribution, e: EvidenceRow, target: int, cap: int = SEPARATOR_CAP, seed: int = 0
) -> VariableSet:
    graph = _target_component_graph(d, e, target)
    found = find_separator(graph, cap, exclude=[target], seed=seed)
    return found if found is not None else frozenset()


def query(
    d: Distribution,
    e: EvidenceRow,
    target: int,
    strategy: str = "auto",
    *,
    threshold: int = AUTO_BLANKET_THRESHOLD,
    cap: int = SEPARATOR_CAP,
    seed: int = 0,
) -> QueryResult:
    """Conditional ``P(target = 1 | e)`` by the requested strategy.

    ``auto`` uses the blanket and switches to separator summation when the
    target's component has more than ``threshold`` variables.
    """
    if strategy not in STRATEGIES:
        raise UsageError(f"unknown strategy {strategy!r}; choose from {', '.join(STRATEGIES)}")
    if strategy == "direct":
        result = conditional_probability(d, e, target)
        result.diagnostics = {
            "strategy": "direct",
            "blanket": None,
            "component_sizes": None,
            "separator": None,
            "summation_terms": 1,
        }
    elif strategy == "blanket":
        result = markov_blanket_query(d, e, target)
    elif strategy == "separator":
        sep = choose_separator(d, e, target, cap, seed)
        result = separator_query(d, e, target, sep, cap)
    else:
        result = markov_blanket_query(d, e, target)
        if len(result.diagnostics["blanket"]) + 1 > threshold:
            sep = choose_separator(d, e, target, cap, seed)
            if sep:
                result = separator_query(d, e, target, sep, cap)
    result.diagnostics["requested"] = strategy
    return result
