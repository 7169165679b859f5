"""Generic local identifiability by Jacobian rank over Z/p.

The Jacobian of the coefficient map is evaluated at k random points of the
prime field; the generic rank is the largest rank seen. A parameter, or any
rational function of the parameters, is locally identifiable exactly when its
gradient lies in the Jacobian row space at every point attaining that rank.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

from identifiability import verdicts
from identifiability.compartments import CompModel, ParamIndex
from identifiability.exceptions import DenominatorVanishes, UnknownParameter
from identifiability.expressions import RationalFunction
from identifiability.io_equations import CoefficientMap, io_coefficient_map
from identifiability.lattice import integer_kernel
from identifiability.linalg import RowSpace, select_columns
from identifiability.polyring import (
    PRIME,
    FieldPoint,
    JacobianEvaluator,
    MPoly,
    field_points,
)

logger = logging.getLogger(__name__)

DEFAULT_TRIALS = 3
DEFAULT_SEED = 0
DENOMINATOR_RETRIES = 10


@dataclass(frozen=True)
class Confidence:
    degree_bound: int
    num_params: int
    trials: int
    prime: int = PRIME

    @classmethod
    def of_map(cls, cmap: CoefficientMap, trials: int) -> Confidence:
        return cls(degree_bound=cmap.order, num_params=cmap.num_params, trials=trials)

    @classmethod
    def worst(cls, bounds: Iterable[Confidence], trials: int) -> Confidence:
        """The weakest of several bounds; an empty family has nothing to bound."""
        return max(bounds, key=lambda c: c.per_trial_bound, default=cls(0, 0, trials))

    @property
    def per_trial_bound(self) -> Fraction:
        return Fraction(self.degree_bound * self.num_params, self.prime)

    @property
    def failure_bound(self) -> Fraction:
        return self.per_trial_bound**self.trials

    @property
    def confidence(self) -> float:
        return float(1 - self.failure_bound)

    def line(self) -> str:
        d = self.degree_bound * self.num_params
        return (
            f"Schwartz-Zippel: per-trial failure <= D/p = {d}/{self.prime} "
            f"(~{float(self.per_trial_bound):.3g}), {self.trials} trials, "
            f"rank wrong with probability <= {float(self.failure_bound):.3g}"
        )


class JacobianSample:
    """The Jacobian of one coefficient map at a deterministic set of points."""

    def __init__(self, cmap: CoefficientMap, trials: int = DEFAULT_TRIALS, seed: int = DEFAULT_SEED):
        self.cmap = cmap
        self.trials = trials
        self.seed = seed
        self.nvars = cmap.num_params
        self._evaluator = JacobianEvaluator(cmap.nonconstant(), self.nvars)
        self._stream = field_points(self.nvars, seed)
        self.points: list[FieldPoint] = []
        self.matrices: list[list[list[int]]] = []
        self.spaces: list[RowSpace] = []
        for _ in range(trials):
            self._draw()
        ranks = [space.rank for space in self.spaces]
        self.rank = max(ranks, default=0)
        if len(set(ranks)) > 1:
            logger.warning(
                "rank disagrees across points (%s) for seed %d; using the maximum",
                ranks,
                seed,
            )

    def _draw(self) -> int:
        pt = next(self._stream)
        matrix = self._evaluator.at(pt)
        self.points.append(pt)
        self.matrices.append(matrix)
        self.spaces.append(RowSpace(matrix, self.nvars))
        return len(self.points) - 1

    def extra_point(self) -> int:
        """Evaluate one more point from the same stream; returns its index."""
        index = self._draw()
        self.rank = max(self.rank, self.spaces[index].rank)
        return index

    @property
    def kernel_dim(self) -> int:
        return self.nvars - self.rank

    def generic_indices(self) -> list[int]:
        return [k for k, space in enumerate(self.spaces) if space.rank == self.rank]

    def contains(self, vector: Sequence[int]) -> bool:
        """Whether a constant gradient lies in the row space at the generic points."""
        return all(self.spaces[k].contains(vector) for k in self.generic_indices()[: self.trials])

    def column_rank(self, keep: Sequence[int]) -> int:
        """Rank of the Jacobian restricted to some columns, maximised over points."""
        return max(
            (
                RowSpace(select_columns(self.matrices[k], keep), len(keep)).rank
                for k in range(len(self.points))
            ),
            default=0,
        )

    def confidence(self) -> Confidence:
        return Confidence.of_map(self.cmap, self.trials)


@dataclass(frozen=True)
class RankResult:
    rank: int
    confidence: Confidence
    seed: int


@dataclass(frozen=True)
class IdentReport:
    rank: int
    num_params: int
    kernel_dim: int
    model_verdict: str
    per_param: dict[str, str]
    confidence: Confidence
    seeds: tuple[int, ...]
    scaling_dim: int | None = None
    notes: tuple[str, ...] = field(default=())

    @property
    def identifiable(self) -> bool:
        return self.model_verdict == verdicts.LOCALLY_IDENTIFIABLE


def generic_rank(
    c: CoefficientMap, trials: int = DEFAULT_TRIALS, seed: int = DEFAULT_SEED
) -> RankResult:
    sample = JacobianSample(c, trials, seed)
    return RankResult(rank=sample.rank, confidence=sample.confidence(), seed=seed)


def sample_for(m: CompModel, trials: int = DEFAULT_TRIALS, seed: int = DEFAULT_SEED) -> JacobianSample:
    return JacobianSample(io_coefficient_map(m), trials, seed)


def confidence_for(m: CompModel, trials: int = DEFAULT_TRIALS) -> Confidence:
    """The rank bound for m without drawing any points."""
    return Confidence.of_map(io_coefficient_map(m), trials)


def _unit(nvars: int, index: int) -> list[int]:
    vector = [0] * nvars
    vector[index] = 1
    return vector


def parameter_identifiability(
    m: CompModel,
    p: ParamIndex | str,
    trials: int = DEFAULT_TRIALS,
    seed: int = DEFAULT_SEED,
    sample: JacobianSample | None = None,
) -> str:
    if isinstance(p, str):
        p = m.param(p)
    elif p not in m.params:
        msg = f"{p.name} does not belong to this model"
        raise UnknownParameter(msg)
    sample = sample or sample_for(m, trials, seed)
    if sample.contains(_unit(m.num_params, p.ordinal)):
        return verdicts.LOCALLY_IDENTIFIABLE
    return verdicts.UNIDENTIFIABLE


def local_identifiability(
    m: CompModel,
    trials: int = DEFAULT_TRIALS,
    seed: int = DEFAULT_SEED,
    sample: JacobianSample | None = None,
) -> IdentReport:
    sample = sample or sample_for(m, trials, seed)
    if sample.kernel_dim == 0:
        per_param = {name: verdicts.LOCALLY_IDENTIFIABLE for name in m.param_names}
    else:
        per_param = {
            p.name: parameter_identifiability(m, p, sample=sample) for p in m.params
        }
    return IdentReport(
        rank=sample.rank,
        num_params=m.num_params,
        kernel_dim=sample.kernel_dim,
        model_verdict=verdicts.from_rank(sample.kernel_dim),
        per_param=per_param,
        confidence=sample.confidence(),
        seeds=(seed,),
    )


def function_identifiability(
    m: CompModel,
    f: RationalFunction,
    trials: int = DEFAULT_TRIALS,
    seed: int = DEFAULT_SEED,
    sample: JacobianSample | None = None,
    retries: int = DENOMINATOR_RETRIES,
) -> str:
    if f.numerator.nvars != m.num_params:
        msg = "expression was parsed for a different model"
        raise UnknownParameter(msg)
    sample = sample or sample_for(m, trials, seed)
    if m.num_params == 0:
        return verdicts.LOCALLY_IDENTIFIABLE
    checked = 0
    resampled = 0
    candidates = iter(list(range(len(sample.points))))
    while checked < sample.trials:
        k = next(candidates, None)
        if k is None:
            if resampled >= retries:
                msg = f"denominator of {f.text or 'the expression'} vanished at every sampled point"
                raise DenominatorVanishes(msg)
            resampled += 1
            logger.info("resampling a point for %s", f.text or "expression")
            k = sample.extra_point()
        if sample.spaces[k].rank != sample.rank:
            continue
        gradient = f.gradient_mod(sample.points[k].values, sample.points[k].prime)
        if gradient is None:
            continue
        if not sample.spaces[k].contains(gradient):
            return verdicts.UNIDENTIFIABLE
        checked += 1
    return verdicts.LOCALLY_IDENTIFIABLE


# -- scaling symmetries ------------------------------------------------------------


@dataclass(frozen=True)
class ScalingSymmetry:
    # vectors over all compartments, zero on inputs and outputs
    basis: tuple[tuple[int, ...], ...]
    dim: int
    kernel_dim: int
    complete: bool
    # exponent vectors over the parameters, Hermite-reduced
    invariants_basis: tuple[tuple[int, ...], ...]
    free_compartments: tuple[int, ...]

    @property
    def gap(self) -> int:
        return self.kernel_dim - self.dim

    def invariant_monomials(self) -> list[MPoly]:
        return [MPoly.monomial(e) for e in self.invariants_basis]


def weight_matrix(m: CompModel, free: Sequence[int]) -> list[list[int]]:
    """Row per parameter: the weight of that parameter under scaling v."""
    position = {c: k for k, c in enumerate(free)}
    rows = []
    for p in m.params:
        row = [0] * len(free)
        if not p.is_leak:
            if p.to in position:
                row[position[p.to]] += 1  # type: ignore[index]
            if p.source in position:
                row[position[p.source]] -= 1
        rows.append(row)
    return rows


def scaling_symmetries(
    m: CompModel,
    trials: int = DEFAULT_TRIALS,
    seed: int = DEFAULT_SEED,
    sample: JacobianSample | None = None,
) -> ScalingSymmetry:
    sample = sample or sample_for(m, trials, seed)
    pinned = set(m.inputs) | set(m.outputs)
    free = [c for c in range(m.n) if c not in pinned]
    w = weight_matrix(m, free)
    exponents = sorted(
        {exps for f in sample.cmap.nonconstant() for exps in f.terms}
    )
    constraint = [
        [sum(e[p] * w[p][k] for p in range(m.num_params)) for k in range(len(free))]
        for e in exponents
    ]
    reduced = integer_kernel(constraint, len(free)) if free else []

    # the log-Jacobian J*diag(x) must annihilate every direction at every point
    for k, pt in enumerate(sample.points):
        lj_w = [
            [
                sum(row[p] * pt.values[p] * w[p][c] for p in range(m.num_params)) % pt.prime
                for c in range(len(free))
            ]
            for row in sample.matrices[k]
        ]
        modular_dim = len(free) - RowSpace(lj_w, len(free)).rank if free else 0
        if modular_dim != len(reduced):
            logger.warning(
                "scaling dimension %d at point %d differs from exact dimension %d",
                modular_dim,
                k,
                len(reduced),
            )
        for v in reduced:
            if any(sum(r * x for r, x in zip(row, v, strict=True)) % pt.prime for row in lj_w):
                logger.warning("scaling direction %s fails at point %d", v, k)

    basis = []
    weights = []
    for v in reduced:
        full = [0] * m.n
        for c, x in zip(free, v, strict=True):
            full[c] = x
        basis.append(tuple(full))
        weights.append([sum(w[p][c] * v[c] for c in range(len(free))) for p in range(m.num_params)])
    if weights:
        invariants = integer_kernel(weights, m.num_params)
    else:
        invariants = [_unit(m.num_params, p) for p in range(m.num_params)]
    return ScalingSymmetry(
        basis=tuple(basis),
        dim=len(basis),
        kernel_dim=sample.kernel_dim,
        complete=len(basis) == sample.kernel_dim,
        invariants_basis=tuple(tuple(e) for e in invariants),
        free_compartments=tuple(free),
    )


def monomial_weight(m: CompModel, exponents: Sequence[int], v: Sequence[int]) -> int:
    """Weight of a parameter monomial under the scaling v (over compartments)."""
    total = 0
    for p, e in zip(m.params, exponents, strict=True):
        if e and not p.is_leak:
            total += e * (v[p.to] - v[p.source])  # type: ignore[index]
    return total


def rank_of_polys(
    polys: Sequence[MPoly], nvars: int, trials: int = DEFAULT_TRIALS, seed: int = DEFAULT_SEED
) -> int:
    """Generic Jacobian rank of an arbitrary list of polynomials."""
    evaluator = JacobianEvaluator([f for f in polys if not f.is_constant()], nvars)
    return max(
        (RowSpace(evaluator.at(pt), nvars).rank for pt in itertools.islice(field_points(nvars, seed), trials)),
        default=0,
    )
