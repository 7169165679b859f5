"""Linear compartmental models and their graph structure.

Compartments are numbered from 1 in everything a user sees (model files,
parameter names, reports) and from 0 inside this package. ``validate_model``
is the only place the shift happens on the way in; ``label`` on the way out.
"""

from __future__ import annotations

import hashlib
import json
import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from enum import StrEnum
from functools import cached_property
from typing import Any

import networkx as nx

from identifiability.exceptions import (
    DuplicateEdge,
    EmptyInputs,
    EmptyOutputs,
    IndexOutOfRange,
    ModelValidationError,
    SelfLoop,
    UnknownParameter,
)
from identifiability.polyring import MPoly, PolyMatrix


class LeakConvention(StrEnum):
    # a0j is the flow from j to the environment; the diagonal also subtracts
    # every outgoing edge rate.
    ENVIRONMENT = "environment"
    # a0j is the whole outflow rate of leak compartment j.
    TOTAL = "total"


EDGE = "edge"
LEAK = "leak"


def label(index: int) -> int:
    return index + 1


@dataclass(frozen=True)
class ParamIndex:
    kind: str
    to: int | None
    source: int
    ordinal: int
    name: str

    @property
    def is_leak(self) -> bool:
        return self.kind == LEAK


def _param_name(to: int | None, source: int, wide: bool) -> str:
    first = 0 if to is None else label(to)
    if wide:
        return f"a{first}_{label(source)}"
    return f"a{first}{label(source)}"


@dataclass(frozen=True)
class CompModel:
    n: int
    edges: tuple[tuple[int, int], ...]
    inputs: tuple[int, ...]
    outputs: tuple[int, ...]
    leaks: tuple[int, ...] = ()
    leak_convention: LeakConvention = LeakConvention.ENVIRONMENT
    name: str = field(default="", compare=False)
    notes: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or self.n < 1:
            msg = f"compartments must be a positive integer, got {self.n!r}"
            raise ModelValidationError(msg)
        seen = set()
        for source, to in self.edges:
            if source == to:
                msg = f"edge [{label(source)}, {label(to)}] is a self-loop"
                raise SelfLoop(msg)
            for c in (source, to):
                if not 0 <= c < self.n:
                    msg = f"edge [{label(source)}, {label(to)}] names compartment {label(c)} outside 1..{self.n}"
                    raise IndexOutOfRange(msg)
            if (source, to) in seen:
                msg = f"edge [{label(source)}, {label(to)}] appears twice"
                raise DuplicateEdge(msg)
            seen.add((source, to))
        if not self.inputs:
            msg = "the model has no input compartment"
            raise EmptyInputs(msg)
        if not self.outputs:
            msg = "the model has no output compartment"
            raise EmptyOutputs(msg)
        for kind, members in (
            ("input", self.inputs),
            ("output", self.outputs),
            ("leak", self.leaks),
        ):
            for c in members:
                if not 0 <= c < self.n:
                    msg = f"{kind} compartment {label(c)} outside 1..{self.n}"
                    raise IndexOutOfRange(msg)
            if len(set(members)) != len(members):
                msg = f"{kind} compartments {[label(c) for c in members]} repeat an entry"
                raise ModelValidationError(msg)
        object.__setattr__(self, "edges", tuple(sorted(self.edges, key=lambda e: (e[1], e[0]))))
        object.__setattr__(self, "inputs", tuple(sorted(self.inputs)))
        object.__setattr__(self, "outputs", tuple(sorted(self.outputs)))
        object.__setattr__(self, "leaks", tuple(sorted(self.leaks)))
        object.__setattr__(self, "leak_convention", LeakConvention(self.leak_convention))

    # -- parameters ----------------------------------------------------------

    @cached_property
    def params(self) -> tuple[ParamIndex, ...]:
        wide = self.n >= 10
        params = [
            ParamIndex(EDGE, to, source, ordinal, _param_name(to, source, wide))
            for ordinal, (source, to) in enumerate(self.edges)
        ]
        offset = len(params)
        params.extend(
            ParamIndex(LEAK, None, j, offset + k, _param_name(None, j, wide))
            for k, j in enumerate(self.leaks)
        )
        return tuple(params)

    @property
    def num_params(self) -> int:
        return len(self.params)

    @cached_property
    def param_names(self) -> tuple[str, ...]:
        return tuple(p.name for p in self.params)

    @cached_property
    def _by_name(self) -> dict[str, ParamIndex]:
        return {p.name: p for p in self.params}

    def param(self, name: str) -> ParamIndex:
        try:
            return self._by_name[name]
        except KeyError:
            known = ", ".join(self.param_names) or "none"
            msg = f"{name!r} is not a parameter of this model (known: {known})"
            raise UnknownParameter(msg) from None

    def edge_param(self, source: int, to: int) -> ParamIndex:
        return self.params[self.edges.index((source, to))]

    def leak_param(self, j: int) -> ParamIndex:
        return self.params[len(self.edges) + self.leaks.index(j)]

    def variable(self, p: ParamIndex) -> MPoly:
        return MPoly.variable(p.ordinal, self.num_params)

    # -- graph -----------------------------------------------------------------

    @cached_property
    def digraph(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(range(self.n))
        graph.add_edges_from(self.edges)
        return nx.freeze(graph)

    # -- adjustments -------------------------------------------------------------

    def with_sets(
        self,
        inputs: Iterable[int] | None = None,
        outputs: Iterable[int] | None = None,
        leaks: Iterable[int] | None = None,
    ) -> CompModel:
        return CompModel(
            n=self.n,
            edges=self.edges,
            inputs=tuple(self.inputs if inputs is None else inputs),
            outputs=tuple(self.outputs if outputs is None else outputs),
            leaks=tuple(self.leaks if leaks is None else leaks),
            leak_convention=self.leak_convention,
            name=self.name,
            notes=self.notes,
        )

    # -- serialization -------------------------------------------------------------

    def to_dict(self) -> dict[str, Any]:
        """The model-file form (1-based)."""
        raw: dict[str, Any] = {
            "compartments": self.n,
            "edges": [[label(s), label(t)] for s, t in self.edges],
            "inputs": [label(c) for c in self.inputs],
            "outputs": [label(c) for c in self.outputs],
            "leaks": [label(c) for c in self.leaks],
        }
        if self.leak_convention != LeakConvention.ENVIRONMENT:
            raw["leak_convention"] = str(self.leak_convention)
        return raw

    @cached_property
    def model_hash(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()[:16]

    def describe_edges(self) -> str:
        return ";".join(f"{label(s)}>{label(t)}" for s, t in self.edges)


def _as_index_list(raw: Any, key: str) -> list[int]:
    if raw is None:
        return []
    if not isinstance(raw, list | tuple | set | frozenset):
        msg = f"{key} must be a list of compartment numbers, got {raw!r}"
        raise ModelValidationError(msg)
    values = []
    for item in sorted(raw) if isinstance(raw, set | frozenset) else raw:
        if isinstance(item, bool) or not isinstance(item, int):
            msg = f"{key} entry {item!r} is not an integer"
            raise ModelValidationError(msg)
        values.append(item - 1)
    return values


def validate_model(raw: Mapping[str, Any]) -> CompModel:
    """Build a CompModel from a 1-based description.

    ``raw`` has the keys of a model file: compartments, edges (a list of
    [from, to] pairs), inputs, outputs, leaks and optionally name, notes and
    leak_convention.
    """
    n = raw.get("compartments")
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        msg = f"compartments must be a positive integer, got {n!r}"
        raise ModelValidationError(msg)
    edges = []
    for position, pair in enumerate(raw.get("edges") or [], start=1):
        if (
            not isinstance(pair, list | tuple)
            or len(pair) != 2
            or not all(isinstance(c, int) and not isinstance(c, bool) for c in pair)
        ):
            msg = f"edge {position} is {pair!r}, expected a [from, to] pair of integers"
            raise ModelValidationError(msg)
        edges.append((pair[0] - 1, pair[1] - 1))
    convention = raw.get("leak_convention", LeakConvention.ENVIRONMENT)
    try:
        convention = LeakConvention(convention)
    except ValueError:
        choices = ", ".join(c.value for c in LeakConvention)
        msg = f"leak_convention {convention!r} is not one of {choices}"
        raise ModelValidationError(msg) from None
    return CompModel(
        n=n,
        edges=tuple(edges),
        inputs=tuple(_as_index_list(raw.get("inputs"), "inputs")),
        outputs=tuple(_as_index_list(raw.get("outputs"), "outputs")),
        leaks=tuple(_as_index_list(raw.get("leaks"), "leaks")),
        leak_convention=convention,
        name=str(raw.get("name") or ""),
        notes=str(raw.get("notes") or ""),
    )


def compartmental_matrix(m: CompModel) -> PolyMatrix:
    nvars = m.num_params
    entries = [[MPoly.zero(nvars) for _ in range(m.n)] for _ in range(m.n)]
    for p in m.params:
        if p.is_leak:
            continue
        a = m.variable(p)
        entries[p.to][p.source] = entries[p.to][p.source] + a  # type: ignore[index]
        if m.leak_convention == LeakConvention.ENVIRONMENT or p.source not in m.leaks:
            entries[p.source][p.source] = entries[p.source][p.source] - a
    for j in m.leaks:
        entries[j][j] = entries[j][j] - m.variable(m.leak_param(j))
    return PolyMatrix(entries, nvars)


def relabel(m: CompModel, permutation: Sequence[int]) -> CompModel:
    """Rename compartment i to ``permutation[i]`` (0-based)."""
    if sorted(permutation) != list(range(m.n)):
        msg = f"{list(permutation)} is not a permutation of {m.n} compartments"
        raise ModelValidationError(msg)
    return CompModel(
        n=m.n,
        edges=tuple((permutation[s], permutation[t]) for s, t in m.edges),
        inputs=tuple(permutation[c] for c in m.inputs),
        outputs=tuple(permutation[c] for c in m.outputs),
        leaks=tuple(permutation[c] for c in m.leaks),
        leak_convention=m.leak_convention,
        name=m.name,
        notes=m.notes,
    )


def relabel_param(m: CompModel, p: ParamIndex, permutation: Sequence[int]) -> str:
    """Name of ``p`` after ``relabel(m, permutation)``."""
    target = relabel(m, permutation)
    if p.is_leak:
        return target.leak_param(permutation[p.source]).name
    return target.edge_param(permutation[p.source], permutation[p.to]).name  # type: ignore[index]


@dataclass(frozen=True)
class GraphProps:
    strongly_connected: bool
    strongly_io_connected: bool
    is_bidirected_tree: bool
    is_directed_cycle: bool
    is_directed_path: bool
    is_catenary: bool
    is_mammillary: bool
    # None when |In| != 1 or |Out| != 1; math.inf when unreachable.
    io_distance: float | None
    output_reachable: dict[int, frozenset[int]]
    cycle_order: tuple[int, ...] | None = None
    path_ends: tuple[int, int] | None = None
    catenary_ends: tuple[int, ...] = ()
    mammillary_centers: tuple[int, ...] = ()

    @property
    def reachable_union(self) -> frozenset[int]:
        return frozenset().union(*self.output_reachable.values())


def _is_bidirected(graph: nx.DiGraph) -> bool:
    return all(graph.has_edge(v, u) for u, v in graph.edges)


def _strongly_io_connected(m: CompModel, graph: nx.DiGraph) -> bool:
    if not nx.is_weakly_connected(graph):
        return False
    component = {}
    for k, members in enumerate(nx.strongly_connected_components(graph)):
        for v in members:
            component[v] = k
    from_inputs = set(m.inputs).union(*(nx.descendants(graph, c) for c in m.inputs))
    to_outputs = set(m.outputs).union(*(nx.ancestors(graph, c) for c in m.outputs))
    return all(
        component[u] == component[v] or (u in from_inputs and v in to_outputs)
        for u, v in graph.edges
    )


def _cycle_order(graph: nx.DiGraph) -> tuple[int, ...]:
    order = [0]
    while len(order) < graph.number_of_nodes():
        (nxt,) = graph.successors(order[-1])
        order.append(nxt)
    return tuple(order)


def graph_props(m: CompModel) -> GraphProps:
    graph = m.digraph
    n = m.n
    strongly = nx.is_strongly_connected(graph)
    undirected = graph.to_undirected(as_view=True)
    bidirected_tree = _is_bidirected(graph) and nx.is_tree(undirected)
    degrees = dict(undirected.degree())

    directed_cycle = (
        n >= 2
        and graph.number_of_edges() == n
        and all(graph.in_degree(v) == 1 and graph.out_degree(v) == 1 for v in graph)
        and strongly
    )
    directed_path = (
        n >= 2
        and graph.number_of_edges() == n - 1
        and nx.is_weakly_connected(graph)
        and all(graph.in_degree(v) <= 1 and graph.out_degree(v) <= 1 for v in graph)
    )
    path_ends = None
    if directed_path:
        source = next(v for v in graph if graph.in_degree(v) == 0)
        sink = next(v for v in graph if graph.out_degree(v) == 0)
        path_ends = (source, sink)

    catenary = bidirected_tree and all(d <= 2 for d in degrees.values())
    catenary_ends = tuple(v for v in range(n) if degrees[v] <= 1) if catenary else ()
    centers = (
        tuple(v for v in range(n) if degrees[v] == n - 1) if bidirected_tree else ()
    )

    io_distance: float | None = None
    if len(m.inputs) == 1 and len(m.outputs) == 1:
        try:
            io_distance = nx.shortest_path_length(graph, m.inputs[0], m.outputs[0])
        except nx.NetworkXNoPath:
            io_distance = math.inf

    return GraphProps(
        strongly_connected=strongly,
        strongly_io_connected=_strongly_io_connected(m, graph),
        is_bidirected_tree=bidirected_tree,
        is_directed_cycle=directed_cycle,
        is_directed_path=directed_path,
        is_catenary=catenary,
        is_mammillary=bool(centers),
        io_distance=io_distance,
        output_reachable={
            i: frozenset(nx.ancestors(graph, i) | {i}) for i in m.outputs
        },
        cycle_order=_cycle_order(graph) if directed_cycle else None,
        path_ends=path_ends,
        catenary_ends=catenary_ends,
        mammillary_centers=centers,
    )
