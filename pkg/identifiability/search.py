"""Searches for the smallest model adjustments that restore identifiability.

Minimal always means minimum cardinality: every set of the reported size is
tried and all successes are returned, so no proper subset of a reported set
can succeed.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Any

from identifiability.compartments import CompModel, label
from identifiability.criteria import unidentifiable_params_by_reachability
from identifiability.engine import DEFAULT_SEED, DEFAULT_TRIALS, sample_for

logger = logging.getLogger(__name__)

ADD_OUTPUTS = "add-outputs"
FIX_PARAMS = "fix-params"

DEFAULT_BUDGET = 3

OUTPUT = "y"
INPUT = "u"


@dataclass(frozen=True)
class AdjustmentResult:
    kind: str
    minimal_sets: tuple[tuple[str, ...], ...]
    budget: int
    evaluations: int
    exhausted_budget: bool = False
    pruned: int = 0
    lower_bound: int = 0

    @property
    def minimum(self) -> int | None:
        if not self.minimal_sets:
            return None
        return len(self.minimal_sets[0])

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "minimality": "cardinality",
            "minimum": self.minimum,
            "minimal_sets": [list(s) for s in self.minimal_sets],
            "budget": self.budget,
            "evaluations": self.evaluations,
            "pruned": self.pruned,
            "exhausted_budget": self.exhausted_budget,
        }


@dataclass
class KernelMemo:
    """kernel_dim by model hash; one memo serves a whole run."""

    trials: int = DEFAULT_TRIALS
    seed: int = DEFAULT_SEED
    evaluations: int = 0
    cache: dict[str, int] = field(default_factory=dict)

    def kernel_dim(self, m: CompModel) -> int:
        if m.model_hash not in self.cache:
            self.evaluations += 1
            self.cache[m.model_hash] = sample_for(m, self.trials, self.seed).kernel_dim
        return self.cache[m.model_hash]


def _adjusted(m: CompModel, additions: tuple[tuple[str, int], ...]) -> CompModel:
    outputs = set(m.outputs) | {c for kind, c in additions if kind == OUTPUT}
    inputs = set(m.inputs) | {c for kind, c in additions if kind == INPUT}
    return m.with_sets(inputs=sorted(inputs), outputs=sorted(outputs))


def _set_name(additions: tuple[tuple[str, int], ...]) -> tuple[str, ...]:
    return tuple(f"{kind}{label(c)}" for kind, c in additions)


def minimal_output_additions(
    m: CompModel,
    budget: int = DEFAULT_BUDGET,
    include_inputs: bool = False,
    trials: int = DEFAULT_TRIALS,
    seed: int = DEFAULT_SEED,
    memo: KernelMemo | None = None,
) -> AdjustmentResult:
    memo = memo or KernelMemo(trials, seed)
    start = memo.evaluations
    candidates = [(OUTPUT, c) for c in range(m.n) if c not in m.outputs]
    if include_inputs:
        candidates += [(INPUT, c) for c in range(m.n) if c not in m.inputs]
    pruned = 0
    for size in range(min(budget, len(candidates)) + 1):
        successes = []
        for additions in itertools.combinations(candidates, size):
            adjusted = _adjusted(m, additions)
            if unidentifiable_params_by_reachability(adjusted):
                pruned += 1
                continue
            if memo.kernel_dim(adjusted) == 0:
                successes.append(_set_name(additions))
        if successes:
            logger.info("%s: %d minimal addition set(s) of size %d", m.model_hash, len(successes), size)
            return AdjustmentResult(
                kind=ADD_OUTPUTS,
                minimal_sets=tuple(sorted(successes)),
                budget=budget,
                evaluations=memo.evaluations - start,
                pruned=pruned,
            )
    return AdjustmentResult(
        kind=ADD_OUTPUTS,
        minimal_sets=(),
        budget=budget,
        evaluations=memo.evaluations - start,
        exhausted_budget=True,
        pruned=pruned,
    )


def minimal_parameter_fixings(
    m: CompModel,
    budget: int = DEFAULT_BUDGET,
    trials: int = DEFAULT_TRIALS,
    seed: int = DEFAULT_SEED,
) -> AdjustmentResult:
    sample = sample_for(m, trials, seed)
    lower = sample.kernel_dim
    if lower == 0:
        return AdjustmentResult(kind=FIX_PARAMS, minimal_sets=((),), budget=budget, evaluations=0)
    # a parameter that cannot reach any output stays unidentifiable unless fixed
    required = {p.ordinal for p in unidentifiable_params_by_reachability(m)}
    evaluations = 0
    pruned = 0
    everything = range(m.num_params)
    for size in range(lower, min(budget, m.num_params) + 1):
        successes = []
        for fixed in itertools.combinations(everything, size):
            if not required <= set(fixed):
                pruned += 1
                continue
            keep = [k for k in everything if k not in fixed]
            evaluations += 1
            if sample.column_rank(keep) == len(keep):
                successes.append(tuple(m.params[k].name for k in fixed))
        if successes:
            return AdjustmentResult(
                kind=FIX_PARAMS,
                minimal_sets=tuple(successes),
                budget=budget,
                evaluations=evaluations,
                pruned=pruned,
                lower_bound=lower,
            )
    return AdjustmentResult(
        kind=FIX_PARAMS,
        minimal_sets=(),
        budget=budget,
        evaluations=evaluations,
        exhausted_budget=True,
        pruned=pruned,
        lower_bound=lower,
    )


def fixing_succeeds(m: CompModel, names: tuple[str, ...], trials: int = DEFAULT_TRIALS, seed: int = DEFAULT_SEED) -> bool:
    sample = sample_for(m, trials, seed)
    fixed = {m.param(name).ordinal for name in names}
    keep = [k for k in range(m.num_params) if k not in fixed]
    return sample.column_rank(keep) == len(keep)


def addition_succeeds(m: CompModel, names: tuple[str, ...], trials: int = DEFAULT_TRIALS, seed: int = DEFAULT_SEED) -> bool:
    additions = tuple((name[0], int(name[1:]) - 1) for name in names)
    return sample_for(_adjusted(m, additions), trials, seed).kernel_dim == 0
