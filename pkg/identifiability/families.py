"""Exhaustive enumeration of model families with both verdicts per model.

Each family fixes a set of graphs on n compartments. Graphs are taken up to
isomorphism, and input/output/leak placements up to the automorphisms of
their graph, so every model appears exactly once.
"""

from __future__ import annotations

import concurrent.futures
import functools
import itertools
import logging
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field
from typing import Any

import networkx as nx
from networkx.algorithms.isomorphism import DiGraphMatcher

from identifiability import verdicts
from identifiability.compartments import CompModel, LeakConvention, validate_model
from identifiability.criteria import agreement, classify
from identifiability.engine import DEFAULT_SEED, DEFAULT_TRIALS, Confidence, local_identifiability
from identifiability.exceptions import SpecTooLarge

logger = logging.getLogger(__name__)

DIRECTED_CYCLE = "directed-cycle"
BIDIRECTED_TREE = "bidirected-tree"
CATENARY = "catenary"
MAMMILLARY = "mammillary"
DIRECTED_PATH = "directed-path"
ALL_DIGRAPHS = "all-digraphs"

SIZE_LIMITS = {
    DIRECTED_CYCLE: 8,
    BIDIRECTED_TREE: 6,
    CATENARY: 8,
    MAMMILLARY: 6,
    DIRECTED_PATH: 8,
    ALL_DIGRAPHS: 4,
}

FAMILIES = list(SIZE_LIMITS)

Edges = tuple[tuple[int, int], ...]
Placement = tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]


@dataclass(frozen=True)
class FamilySpec:
    family: str
    n_min: int
    n_max: int
    # allowed set sizes; None allows every size (inputs and outputs at least 1)
    input_sizes: tuple[int, ...] | None = None
    output_sizes: tuple[int, ...] | None = None
    leak_sizes: tuple[int, ...] | None = None
    dedup: bool = True
    leak_convention: LeakConvention = LeakConvention.ENVIRONMENT

    def check(self) -> None:
        if self.family not in SIZE_LIMITS:
            msg = f"unknown family {self.family!r}; choose from {', '.join(FAMILIES)}"
            raise ValueError(msg)
        limit = SIZE_LIMITS[self.family]
        if self.n_min < 1 or self.n_min > self.n_max:
            msg = f"compartment range {self.n_min}..{self.n_max} is empty"
            raise ValueError(msg)
        if self.n_max > limit:
            msg = f"{self.family} enumeration is limited to n <= {limit}, asked for n = {self.n_max}"
            raise SpecTooLarge(msg)


# -- graphs -------------------------------------------------------------------------


def _bidirected(pairs: Iterable[tuple[int, int]]) -> Edges:
    return tuple(sorted({e for u, v in pairs for e in ((u, v), (v, u))}))


def _all_digraphs(n: int) -> Iterator[Edges]:
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    permutations = list(itertools.permutations(range(n)))
    for mask in range(1 << len(pairs)):
        edges = tuple(pair for k, pair in enumerate(pairs) if mask >> k & 1)
        canonical = min(tuple(sorted((p[u], p[v]) for u, v in edges)) for p in permutations)
        if canonical == edges:
            yield edges


def _trees(n: int) -> Iterator[Edges]:
    if n == 1:
        yield ()
        return
    for tree in nx.nonisomorphic_trees(n):
        yield _bidirected(tree.edges)


def family_graphs(family: str, n: int) -> Iterator[Edges]:
    if family == DIRECTED_CYCLE:
        if n >= 2:
            yield tuple((k, (k + 1) % n) for k in range(n))
    elif family == DIRECTED_PATH:
        if n >= 2:
            yield tuple((k, k + 1) for k in range(n - 1))
    elif family == CATENARY:
        yield _bidirected((k, k + 1) for k in range(n - 1))
    elif family == MAMMILLARY:
        yield _bidirected((0, k) for k in range(1, n))
    elif family == BIDIRECTED_TREE:
        yield from _trees(n)
    elif family == ALL_DIGRAPHS:
        yield from _all_digraphs(n)
    else:
        msg = f"unknown family {family!r}"
        raise ValueError(msg)


def automorphisms(n: int, edges: Edges) -> list[tuple[int, ...]]:
    graph = nx.DiGraph()
    graph.add_nodes_from(range(n))
    graph.add_edges_from(edges)
    found = {
        tuple(mapping[k] for k in range(n))
        for mapping in DiGraphMatcher(graph, graph).isomorphisms_iter()
    }
    return sorted(found)


# -- placements ------------------------------------------------------------------------


def _subsets(n: int, sizes: Sequence[int] | None, minimum: int) -> list[tuple[int, ...]]:
    allowed = range(minimum, n + 1) if sizes is None else [s for s in sizes if minimum <= s <= n]
    return [combo for size in allowed for combo in itertools.combinations(range(n), size)]


def placements(n: int, spec: FamilySpec, symmetries: Sequence[tuple[int, ...]]) -> Iterator[Placement]:
    inputs = _subsets(n, spec.input_sizes, 1)
    outputs = _subsets(n, spec.output_sizes, 1)
    leaks = _subsets(n, spec.leak_sizes, 0)
    for placement in itertools.product(inputs, outputs, leaks):
        if spec.dedup:
            image = min(
                tuple(tuple(sorted(p[c] for c in members)) for members in placement)
                for p in symmetries
            )
            if image != placement:
                continue
        yield placement  # type: ignore[misc]


def family_models(spec: FamilySpec) -> Iterator[CompModel]:
    spec.check()
    for n in range(spec.n_min, spec.n_max + 1):
        for edges in family_graphs(spec.family, n):
            symmetries = automorphisms(n, edges) if spec.dedup else [tuple(range(n))]
            for inputs, outputs, leaks in placements(n, spec, symmetries):
                yield CompModel(
                    n=n,
                    edges=edges,
                    inputs=inputs,
                    outputs=outputs,
                    leaks=leaks,
                    leak_convention=spec.leak_convention,
                )


# -- classification rows -------------------------------------------------------------------


@dataclass(frozen=True)
class FamilyRow:
    sequence: int
    model: CompModel
    rank: int
    kernel_dim: int
    verdict: str
    rule_hits: tuple[str, ...]
    rule_verdicts: tuple[str, ...]
    agreement: bool
    confidence: Confidence = field(compare=False)

    def to_dict(self) -> dict[str, Any]:
        m = self.model.to_dict()
        return {
            "model_hash": self.model.model_hash,
            "n": self.model.n,
            "edges": self.model.describe_edges(),
            "inputs": ";".join(str(c) for c in m["inputs"]),
            "outputs": ";".join(str(c) for c in m["outputs"]),
            "leaks": ";".join(str(c) for c in m["leaks"]),
            "rank": self.rank,
            "kernel_dim": self.kernel_dim,
            "verdict": self.verdict,
            "rule_hits": ";".join(self.rule_hits),
            "agreement": self.agreement,
        }


def classify_row(sequence: int, raw: dict[str, Any], trials: int, seed: int) -> FamilyRow:
    m = validate_model(raw)
    report = local_identifiability(m, trials, seed)
    hits = classify(m)
    return FamilyRow(
        sequence=sequence,
        model=m,
        rank=report.rank,
        kernel_dim=report.kernel_dim,
        verdict=report.model_verdict,
        rule_hits=tuple(h.rule_id for h in hits),
        rule_verdicts=tuple(h.verdict for h in hits),
        agreement=agreement(hits, report),
        confidence=report.confidence,
    )


def _classify_chunk(chunk: list[tuple[int, dict[str, Any]]], trials: int, seed: int) -> list[FamilyRow]:
    return [classify_row(k, raw, trials, seed) for k, raw in chunk]


def enumerate_family(
    spec: FamilySpec,
    trials: int = DEFAULT_TRIALS,
    seed: int = DEFAULT_SEED,
    workers: int = 1,
    chunk_size: int = 64,
) -> Iterator[FamilyRow]:
    """Rows in canonical enumeration order, whatever the number of workers."""
    numbered = ((k, m.to_dict()) for k, m in enumerate(family_models(spec)))
    if workers <= 1:
        for k, raw in numbered:
            yield classify_row(k, raw, trials, seed)
        return
    chunks = (list(batch) for batch in itertools.batched(numbered, chunk_size))
    work = functools.partial(_classify_chunk, trials=trials, seed=seed)
    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
        for rows in pool.map(work, chunks):
            yield from rows


def summarize(rows: Iterable[FamilyRow]) -> dict[str, int]:
    summary = {
        "models": 0,
        "identifiable": 0,
        "unidentifiable": 0,
        "rule_covered": 0,
        "agreements": 0,
        "disagreements": 0,
    }
    for row in rows:
        summary["models"] += 1
        if row.verdict == verdicts.LOCALLY_IDENTIFIABLE:
            summary["identifiable"] += 1
        else:
            summary["unidentifiable"] += 1
        if row.rule_hits:
            summary["rule_covered"] += 1
        summary["agreements" if row.agreement else "disagreements"] += 1
    return summary
