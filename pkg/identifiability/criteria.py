"""Graph-theoretic identifiability rules.

Every rule looks only at the graph and the input/output/leak placement, so
its verdict is known without any algebra. The rank engine is the referee:
``agreement`` says whether the two disagree on a model.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Iterable
from dataclasses import dataclass

import networkx as nx

from identifiability import verdicts
from identifiability.compartments import CompModel, GraphProps, ParamIndex, graph_props
from identifiability.engine import (
    DEFAULT_SEED,
    DEFAULT_TRIALS,
    IdentReport,
    JacobianSample,
    function_identifiability,
    sample_for,
)
from identifiability.exceptions import EnumerationCapExceeded, InternalRuleConflict
from identifiability.expressions import RationalFunction
from identifiability.polyring import MPoly

logger = logging.getLogger(__name__)

CYCLE_CAP = 10_000

TREE_IDENTIFIABLE = "tree.identifiable"
TREE_TOO_MANY_LEAKS = "tree.too-many-leaks"
TREE_FAR_OUTPUT = "tree.far-output"
CYCLE_INTERLACING = "cycle.interlacing"
CYCLE_NON_INTERLACING = "cycle.non-interlacing"
PATH_ENDPOINT_LEAKS = "path.endpoint-leaks"
STRONGLY_CONNECTED_LEAKS = "strongly-connected.leak-bound"
IO_CONNECTED_LEAKS = "io-connected.leak-bound"
INPUT_OUTPUT_EDGE = "strongly-connected.input-output-edge"
CATENARY_ALL = "catenary.all-parameters"
MAMMILLARY_CENTER = "mammillary.center-edges"
UNREACHABLE = "reachability.unreachable"

# rule id -> (verdict, citation tag); order is report order
RULES = {
    TREE_IDENTIFIABLE: (verdicts.MODEL_IDENTIFIABLE, "identifiable-models/bidirected-tree"),
    TREE_TOO_MANY_LEAKS: (verdicts.MODEL_UNIDENTIFIABLE, "unidentifiable-models/bidirected-tree-leaks"),
    TREE_FAR_OUTPUT: (verdicts.MODEL_UNIDENTIFIABLE, "unidentifiable-models/bidirected-tree-distance"),
    CYCLE_INTERLACING: (verdicts.MODEL_IDENTIFIABLE, "identifiable-models/directed-cycle-interlacing"),
    CYCLE_NON_INTERLACING: (verdicts.MODEL_UNIDENTIFIABLE, "unidentifiable-models/directed-cycle-non-interlacing"),
    PATH_ENDPOINT_LEAKS: (verdicts.MODEL_IDENTIFIABLE, "identifiable-models/directed-path"),
    STRONGLY_CONNECTED_LEAKS: (verdicts.MODEL_UNIDENTIFIABLE, "unidentifiable-models/strongly-connected-leak-bound"),
    IO_CONNECTED_LEAKS: (verdicts.MODEL_UNIDENTIFIABLE, "unidentifiable-models/io-connected-leak-bound"),
    INPUT_OUTPUT_EDGE: (verdicts.PARAM_GLOBALLY_IDENTIFIABLE, "global-parameters/input-output-edge"),
    CATENARY_ALL: (verdicts.PARAM_GLOBALLY_IDENTIFIABLE, "global-parameters/catenary"),
    MAMMILLARY_CENTER: (verdicts.PARAM_GLOBALLY_IDENTIFIABLE, "global-parameters/mammillary"),
    UNREACHABLE: (verdicts.PARAM_UNIDENTIFIABLE, "unidentifiable-parameters/output-reachability"),
}


@dataclass(frozen=True)
class RuleHit:
    rule_id: str
    verdict: str
    affected_params: tuple[str, ...]
    citation: str


def _hit(rule_id: str, params: Iterable[ParamIndex] = ()) -> RuleHit:
    verdict, citation = RULES[rule_id]
    ordered = sorted(set(params), key=lambda p: p.ordinal)
    return RuleHit(rule_id, verdict, tuple(p.name for p in ordered), citation)


def leaks_interlace(m: CompModel, props: GraphProps | None = None) -> bool:
    """Leak placement test for directed-cycle models.

    Walking the cycle with the flow, every stretch from one leak (exclusive)
    to the next leak (inclusive) must hold an input or output compartment.
    When the only input sits right after the only output, a second leak is
    always too many.
    """
    props = props or graph_props(m)
    order = props.cycle_order
    if order is None:
        msg = "leak interlacing is defined for directed-cycle models only"
        raise ValueError(msg)
    n = len(order)
    position = {v: k for k, v in enumerate(order)}
    leaks = sorted(m.leaks, key=position.__getitem__)
    if len(m.inputs) == 1 and len(m.outputs) == 1:
        out_pos, in_pos = position[m.outputs[0]], position[m.inputs[0]]
        if in_pos == (out_pos + 1) % n:
            return len(leaks) <= 1
    if len(leaks) <= 1:
        return True
    marked = set(m.inputs) | set(m.outputs)
    for a, start in enumerate(leaks):
        end = position[leaks[(a + 1) % len(leaks)]]
        k = position[start]
        while True:
            k = (k + 1) % n
            if order[k] in marked:
                break
            if k == end:
                return False
    return True


def unidentifiable_params_by_reachability(m: CompModel) -> frozenset[ParamIndex]:
    reachable = graph_props(m).reachable_union
    return frozenset(
        p
        for p in m.params
        if p.source not in reachable
    )


def _tree_hits(m: CompModel, props: GraphProps) -> list[RuleHit]:
    if not props.is_bidirected_tree or len(m.inputs) != 1 or len(m.outputs) != 1:
        return []
    distance = props.io_distance
    assert distance is not None
    if len(m.leaks) <= 1 and distance <= 1:
        return [_hit(TREE_IDENTIFIABLE)]
    hits = []
    if len(m.leaks) >= 2:
        hits.append(_hit(TREE_TOO_MANY_LEAKS))
    if distance >= 2:
        hits.append(_hit(TREE_FAR_OUTPUT))
    return hits


def _global_parameter_hits(m: CompModel, props: GraphProps) -> list[RuleHit]:
    hits = []
    if props.strongly_connected:
        edges = [
            m.edge_param(s, t)
            for s, t in m.edges
            if s in m.inputs and t in m.outputs
        ]
        if edges:
            hits.append(_hit(INPUT_OUTPUT_EDGE, edges))
    if (
        props.is_catenary
        and len(m.inputs) == 1
        and m.inputs == m.outputs
        and m.inputs[0] in props.catenary_ends
        and len(m.leaks) <= 1
        and m.params
    ):
        hits.append(_hit(CATENARY_ALL, m.params))
    if (
        props.is_mammillary
        and len(m.inputs) == 1
        and len(m.outputs) == 1
        and not m.leaks
        and props.io_distance is not None
        and props.io_distance <= 1
    ):
        j = m.outputs[0]
        for c in props.mammillary_centers:
            if j != c:
                hits.append(_hit(MAMMILLARY_CENTER, [m.edge_param(j, c), m.edge_param(c, j)]))
    return hits


def _check_consistency(m: CompModel, hits: list[RuleHit]) -> None:
    model_yes = [h for h in hits if h.verdict == verdicts.MODEL_IDENTIFIABLE]
    model_no = [h for h in hits if h.verdict == verdicts.MODEL_UNIDENTIFIABLE]
    param_yes = {p for h in hits if h.verdict == verdicts.PARAM_GLOBALLY_IDENTIFIABLE for p in h.affected_params}
    param_no = {p for h in hits if h.verdict == verdicts.PARAM_UNIDENTIFIABLE for p in h.affected_params}
    if model_yes and (model_no or param_no):
        msg = f"rules {[h.rule_id for h in hits]} contradict each other on model {m.model_hash}"
        raise InternalRuleConflict(msg)
    if param_yes & param_no:
        msg = f"parameters {sorted(param_yes & param_no)} are claimed both ways on model {m.model_hash}"
        raise InternalRuleConflict(msg)


def classify(m: CompModel) -> list[RuleHit]:
    props = graph_props(m)
    hits = _tree_hits(m, props)
    if props.is_directed_cycle:
        hits.append(_hit(CYCLE_INTERLACING if leaks_interlace(m, props) else CYCLE_NON_INTERLACING))
    if props.is_directed_path and props.path_ends is not None:
        source, sink = props.path_ends
        if m.inputs == (source,) and m.outputs == (sink,) and set(m.leaks) == {source, sink}:
            hits.append(_hit(PATH_ENDPOINT_LEAKS))
    marked = len(set(m.inputs) | set(m.outputs))
    if props.strongly_connected and len(m.inputs) == 1 and len(m.leaks) > marked:
        hits.append(_hit(STRONGLY_CONNECTED_LEAKS))
    if props.strongly_io_connected and len(m.outputs) == 1 and len(m.leaks) > marked:
        hits.append(_hit(IO_CONNECTED_LEAKS))
    hits.extend(_global_parameter_hits(m, props))
    flagged = unidentifiable_params_by_reachability(m)
    if flagged:
        hits.append(_hit(UNREACHABLE, flagged))
    order = list(RULES)
    hits.sort(key=lambda h: (order.index(h.rule_id), h.affected_params))
    _check_consistency(m, hits)
    return hits


def agreement(hits: Iterable[RuleHit], report: IdentReport) -> bool:
    for hit in hits:
        if hit.verdict == verdicts.MODEL_IDENTIFIABLE and report.kernel_dim != 0:
            return False
        if hit.verdict == verdicts.MODEL_UNIDENTIFIABLE and report.kernel_dim == 0:
            return False
        if hit.verdict == verdicts.PARAM_GLOBALLY_IDENTIFIABLE and any(
            report.per_param[p] != verdicts.LOCALLY_IDENTIFIABLE for p in hit.affected_params
        ):
            return False
        if hit.verdict == verdicts.PARAM_UNIDENTIFIABLE and any(
            report.per_param[p] != verdicts.UNIDENTIFIABLE for p in hit.affected_params
        ):
            return False
    return True


def model_rule_verdict(hits: Iterable[RuleHit]) -> str | None:
    for hit in hits:
        if hit.verdict == verdicts.MODEL_IDENTIFIABLE:
            return verdicts.LOCALLY_IDENTIFIABLE
        if hit.verdict == verdicts.MODEL_UNIDENTIFIABLE:
            return verdicts.UNIDENTIFIABLE
    return None


# -- cycle and path monomials --------------------------------------------------------

CYCLE = "cycle"
IO_PATH = "io-path"


@dataclass(frozen=True)
class MonomialCandidate:
    kind: str
    support: tuple[int, ...]
    monomial: MPoly


@dataclass(frozen=True)
class MonomialReport:
    candidates: tuple[tuple[MonomialCandidate, str], ...]
    truncated: bool


def _edge_monomial(m: CompModel, sequence: list[int]) -> MPoly:
    monomial = MPoly.one(m.num_params)
    for source, to in itertools.pairwise(sequence):
        monomial = monomial * m.variable(m.edge_param(source, to))
    return monomial


def _rotate(cycle: list[int]) -> list[int]:
    k = cycle.index(min(cycle))
    return cycle[k:] + cycle[:k]


def cycle_path_monomials(
    m: CompModel,
    cap: int = CYCLE_CAP,
    trials: int = DEFAULT_TRIALS,
    seed: int = DEFAULT_SEED,
    sample: JacobianSample | None = None,
    strict: bool = False,
) -> MonomialReport:
    graph = m.digraph
    found = []
    cycles = itertools.islice(nx.simple_cycles(graph), cap + 1)
    for cycle in cycles:
        support = _rotate(list(cycle))
        found.append(MonomialCandidate(CYCLE, tuple(support), _edge_monomial(m, [*support, support[0]])))
    truncated = len(found) > cap
    found = found[:cap]
    paths = []
    for s in m.inputs:
        for t in m.outputs:
            if s == t:
                continue
            for path in nx.all_simple_paths(graph, s, t):
                if len(found) + len(paths) >= cap:
                    truncated = True
                    break
                paths.append(MonomialCandidate(IO_PATH, tuple(path), _edge_monomial(m, path)))
    if truncated:
        msg = f"cycle and path enumeration stopped at {cap} monomials for model {m.model_hash}"
        if strict:
            raise EnumerationCapExceeded(msg)
        logger.warning(msg)
    found.sort(key=lambda c: (len(c.support), c.support))
    paths.sort(key=lambda c: (len(c.support), c.support))
    sample = sample or sample_for(m, trials, seed)
    names = m.param_names
    results = []
    for candidate in found + paths:
        f = RationalFunction.of(candidate.monomial, candidate.monomial.format(names))
        results.append((candidate, function_identifiability(m, f, sample=sample)))
    return MonomialReport(candidates=tuple(results), truncated=truncated)
