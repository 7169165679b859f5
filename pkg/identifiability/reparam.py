"""Identifiable reparametrizations.

Two constructions are available. For a model with one input and one output
the observability map X = T x, with rows C, CA, ..., CA^(n-1), turns the
system into companion form whose coefficients are the input-output
coefficients themselves. When the scaling symmetries of a model account for
its whole Jacobian kernel, rescaling the free compartments by parameter
monomials leaves a system written only in scaling invariants.

Both results are verified symbolically before they are returned.
"""

from __future__ import annotations

import collections
import dataclasses
import logging
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any

from identifiability import verdicts
from identifiability.compartments import CompModel, compartmental_matrix, label
from identifiability.engine import (
    DEFAULT_SEED,
    DEFAULT_TRIALS,
    JacobianSample,
    sample_for,
    scaling_symmetries,
)
from identifiability.exceptions import NotObservable, NotSISO
from identifiability.io_equations import io_equations, transfer_equation
from identifiability.lattice import lattice_coordinates
from identifiability.linalg import det_mod
from identifiability.polyring import MPoly, PolyMatrix, field_points

logger = logging.getLogger(__name__)

SISO_CANONICAL = "siso-canonical"
SCALING_QUOTIENT = "scaling-quotient"

OBSERVABILITY_POINTS = 3


@dataclass(frozen=True)
class Verification:
    status: str
    residual: str = ""

    @property
    def passed(self) -> bool:
        return self.status == verdicts.PASSED


UNVERIFIED = Verification(status="unverified")


@dataclass(frozen=True)
class NewSystem:
    """X' = matrix X + sum of input_columns u, y = X at the output positions.

    ``matrix`` and the input columns live in the ring of ``param_names``;
    ``substitutions[k]`` writes new parameter k in the original parameters.
    ``derived`` holds named polynomials in the new parameters that the matrix
    and input columns use (the Markov parameters of the companion form).
    """

    param_names: tuple[str, ...]
    matrix: PolyMatrix
    input_columns: tuple[tuple[int, tuple[MPoly, ...]], ...]
    outputs: tuple[tuple[int, int], ...]
    substitutions: tuple[MPoly, ...]
    derived: tuple[tuple[str, MPoly], ...] = ()

    @property
    def num_params(self) -> int:
        return len(self.param_names)


@dataclass(frozen=True)
class Reparametrization:
    kind: str
    model: CompModel
    new_system: NewSystem
    # siso: X = transform @ x
    transform: PolyMatrix | None = None
    # scaling: X_j = scaling[j] * x_j
    scaling: tuple[MPoly, ...] | None = None
    verification: Verification = UNVERIFIED

    def state_definitions(self) -> list[str]:
        names = self.model.param_names
        lines = []
        if self.transform is not None:
            for r, row in enumerate(self.transform.rows):
                terms = _linear_combination(row, [f"x{label(c)}" for c in range(self.model.n)], names)
                lines.append(f"X{r + 1} = {terms}")
        elif self.scaling is not None:
            for j, s in enumerate(self.scaling):
                factor = "" if s == 1 else f"{_factor(s, names)}*"
                lines.append(f"X{label(j)} = {factor}x{label(j)}")
        return lines

    def system_lines(self) -> list[str]:
        system = self.new_system
        derived = {poly: name for name, poly in system.derived}
        states = [f"X{r + 1}" for r in range(system.matrix.nrows)]
        lines = []
        for r, row in enumerate(system.matrix.rows):
            rhs = _linear_combination(row, states, system.param_names)
            for j, column in system.input_columns:
                entry = column[r]
                if entry.is_zero():
                    continue
                coefficient = derived.get(entry) or _factor(entry, system.param_names)
                rhs = f"{rhs} + {coefficient}*u{label(j)}" if rhs != "0" else f"{coefficient}*u{label(j)}"
            lines.append(f"d{states[r]}/dt = {rhs.replace('+ -', '- ')}")
        for i, position in system.outputs:
            lines.append(f"y{label(i)} = {states[position]}")
        return lines

    def parameter_lines(self) -> list[str]:
        original = self.model.param_names
        system = self.new_system
        lines = [
            f"{name} = {poly.format(original)}"
            for name, poly in zip(system.param_names, system.substitutions, strict=True)
        ]
        lines.extend(f"{name} = {poly.format(system.param_names)}" for name, poly in system.derived)
        return lines

    def to_dict(self) -> dict[str, Any]:
        system = self.new_system
        return {
            "kind": self.kind,
            "states": self.state_definitions(),
            "system": self.system_lines(),
            "parameters": [
                {"name": name, "value": poly.format(self.model.param_names)}
                for name, poly in zip(system.param_names, system.substitutions, strict=True)
            ],
            "derived": [
                {"name": name, "value": poly.format(system.param_names)} for name, poly in system.derived
            ],
            "verification": {
                "status": self.verification.status,
                "residual": self.verification.residual,
            },
        }


@dataclass(frozen=True)
class NotApplicable:
    status: str
    reason: str
    symmetry_dim: int
    kernel_dim: int

    @property
    def gap(self) -> int:
        return self.kernel_dim - self.symmetry_dim

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": SCALING_QUOTIENT,
            "status": self.status,
            "reason": self.reason,
            "symmetry_dim": self.symmetry_dim,
            "kernel_dim": self.kernel_dim,
            "gap": self.gap,
        }


def _factor(poly: MPoly, names: Sequence[str]) -> str:
    text = poly.format(names)
    return text if poly.is_monomial() and not text.startswith("-") else f"({text})"


def _linear_combination(coefficients: Sequence[MPoly], symbols: Sequence[str], names: Sequence[str]) -> str:
    pieces = []
    for c, symbol in zip(coefficients, symbols, strict=True):
        if c.is_zero():
            continue
        if c == 1:
            pieces.append(symbol)
        elif c == -1:
            pieces.append(f"-{symbol}")
        elif c.is_monomial():
            pieces.append(f"{c.format(names)}*{symbol}")
        else:
            pieces.append(f"({c.format(names)})*{symbol}")
    return " + ".join(pieces).replace("+ -", "- ") or "0"


# -- single input, single output -------------------------------------------------


def _siso_names(n: int) -> tuple[list[str], list[str], list[str]]:
    return (
        [f"p{m}" for m in range(n)],
        [f"q{m}" for m in range(n)],
        [f"h{m}" for m in range(1, n + 1)],
    )


def observability_matrix(matrix: PolyMatrix, output: int) -> PolyMatrix:
    n = matrix.nrows
    row = PolyMatrix(
        [[MPoly.one(matrix.nvars) if c == output else MPoly.zero(matrix.nvars) for c in range(n)]],
        matrix.nvars,
    )
    rows = []
    for _ in range(n):
        rows.append(row.rows[0])
        row = row @ matrix
    return PolyMatrix(rows, matrix.nvars)


def is_observable(transform: PolyMatrix, seed: int = DEFAULT_SEED) -> bool:
    if transform.nvars == 0:
        return det_mod(transform.evaluate_mod(())) != 0
    points = field_points(transform.nvars, seed)
    return any(det_mod(transform.evaluate_mod(next(points).values)) for _ in range(OBSERVABILITY_POINTS))


def markov_parameters(p: Sequence[MPoly], q: Sequence[MPoly]) -> list[MPoly]:
    """h_1..h_n from q(D)/(D^n + p(D)) = sum h_m D^-m, by series division."""
    n = len(p)
    h: list[MPoly] = []
    for m in range(1, n + 1):
        value = q[n - m]
        for t in range(1, m):
            value = value - p[n - t] * h[m - t - 1]
        h.append(value)
    return h


def companion_matrix(p: Sequence[MPoly], nvars: int) -> PolyMatrix:
    n = len(p)
    rows = []
    for r in range(n):
        if r == n - 1:
            rows.append([-c for c in p])
        else:
            rows.append([MPoly.one(nvars) if c == r + 1 else MPoly.zero(nvars) for c in range(n)])
    return PolyMatrix(rows, nvars)


def siso_canonical_reparam(m: CompModel, seed: int = DEFAULT_SEED) -> Reparametrization:
    if len(m.inputs) != 1 or len(m.outputs) != 1:
        msg = (
            f"the canonical form needs exactly one input and one output, the model has "
            f"{len(m.inputs)} and {len(m.outputs)}"
        )
        raise NotSISO(msg)
    (j,) = m.inputs
    (i,) = m.outputs
    n = m.n
    a = compartmental_matrix(m)
    transform = observability_matrix(a, i)
    if not is_observable(transform, seed):
        msg = f"the observability matrix of output y{label(i)} is singular for generic parameters"
        raise NotObservable(msg)

    denominator, numerator = transfer_equation(a, i, _unit_column(n, j, m.num_params))
    # denominator is D^n + ... highest first; p_m multiplies D^m
    alpha_p = list(reversed(denominator[1:]))
    alpha_q = list(reversed(numerator))

    nvars = 2 * n
    p = [MPoly.variable(k, nvars) for k in range(n)]
    q = [MPoly.variable(n + k, nvars) for k in range(n)]
    h = markov_parameters(p, q)
    p_names, q_names, h_names = _siso_names(n)
    system = NewSystem(
        param_names=tuple(p_names + q_names),
        matrix=companion_matrix(p, nvars),
        input_columns=((j, tuple(h)),),
        outputs=((i, 0),),
        substitutions=tuple(alpha_p + alpha_q),
        derived=tuple(zip(h_names, h, strict=True)),
    )
    unverified = Reparametrization(kind=SISO_CANONICAL, model=m, new_system=system, transform=transform)
    verified = dataclasses.replace(unverified, verification=verify_reparam(m, unverified))
    logger.info("canonical reparametrization of %s: %s", m.model_hash, verified.verification.status)
    return verified


def _unit_column(n: int, j: int, nvars: int) -> list[MPoly]:
    return [MPoly.one(nvars) if c == j else MPoly.zero(nvars) for c in range(n)]


# -- scaling quotient -------------------------------------------------------------------


def _scaling_factors(m: CompModel, basis: Sequence[Sequence[int]]) -> list[MPoly] | None:
    """Monomials s_j of weight -v_j, one per compartment, by breadth-first search.

    Compartments that no symmetry moves keep s_j = 1. Walking an edge j -> k
    out of an assigned k multiplies by a_kj; walking k -> j divides by a_jk.
    """
    nvars = m.num_params
    fixed = [c for c in range(m.n) if all(v[c] == 0 for v in basis)]
    factors: dict[int, MPoly] = {c: MPoly.one(nvars) for c in fixed}
    queue = collections.deque(fixed)
    while queue:
        k = queue.popleft()
        for j in m.digraph.predecessors(k):
            if j not in factors:
                factors[j] = factors[k] * m.variable(m.edge_param(j, k))
                queue.append(j)
        for j in m.digraph.successors(k):
            if j not in factors:
                factors[j] = factors[k] * m.variable(m.edge_param(k, j)) ** -1
                queue.append(j)
    if len(factors) != m.n:
        return None
    return [factors[c] for c in range(m.n)]


def _in_invariants(poly: MPoly, invariants: Sequence[Sequence[int]], nvars: int) -> MPoly | None:
    """Rewrite a polynomial whose monomials are all invariant in the k ring."""
    terms = {}
    for exps, coeff in poly.terms.items():
        coordinates = lattice_coordinates(exps, invariants) if invariants else ([] if not any(exps) else None)
        if coordinates is None:
            return None
        terms[tuple(coordinates)] = coeff
    return MPoly(nvars, terms)


def scaling_reparam(
    m: CompModel,
    trials: int = DEFAULT_TRIALS,
    seed: int = DEFAULT_SEED,
    sample: JacobianSample | None = None,
) -> Reparametrization | NotApplicable:
    sample = sample or sample_for(m, trials, seed)
    symmetry = scaling_symmetries(m, sample=sample)
    if symmetry.kernel_dim == 0:
        return NotApplicable(
            status=verdicts.NOT_NEEDED,
            reason="no reparametrization needed: the model is already locally identifiable",
            symmetry_dim=symmetry.dim,
            kernel_dim=0,
        )
    if not symmetry.complete:
        return NotApplicable(
            status=verdicts.NOT_APPLICABLE,
            reason=(
                f"scaling symmetries span {symmetry.dim} of {symmetry.kernel_dim} "
                f"unidentifiable directions"
            ),
            symmetry_dim=symmetry.dim,
            kernel_dim=symmetry.kernel_dim,
        )
    factors = _scaling_factors(m, symmetry.basis)
    if factors is None:
        return NotApplicable(
            status=verdicts.NOT_APPLICABLE,
            reason="some scaled compartment is not connected to an unscaled one",
            symmetry_dim=symmetry.dim,
            kernel_dim=symmetry.kernel_dim,
        )

    invariants = symmetry.invariants_basis
    r = len(invariants)
    a = compartmental_matrix(m)
    rows = []
    for row_index in range(m.n):
        row = []
        for col in range(m.n):
            entry = a[row_index, col]
            if row_index != col and not entry.is_zero():
                entry = entry * factors[row_index] * factors[col] ** -1
            rewritten = _in_invariants(entry, invariants, r)
            if rewritten is None:
                return NotApplicable(
                    status=verdicts.NOT_APPLICABLE,
                    reason=f"entry ({label(row_index)}, {label(col)}) is not a function of the invariants",
                    symmetry_dim=symmetry.dim,
                    kernel_dim=symmetry.kernel_dim,
                )
            row.append(rewritten)
        rows.append(row)
    system = NewSystem(
        param_names=tuple(f"k{t}" for t in range(1, r + 1)),
        matrix=PolyMatrix(rows, r),
        input_columns=tuple((j, tuple(_unit_column(m.n, j, r))) for j in m.inputs),
        outputs=tuple((i, i) for i in m.outputs),
        substitutions=tuple(symmetry.invariant_monomials()),
    )
    unverified = Reparametrization(
        kind=SCALING_QUOTIENT, model=m, new_system=system, scaling=tuple(factors)
    )
    verified = dataclasses.replace(unverified, verification=verify_reparam(m, unverified))
    logger.info("scaling reparametrization of %s: %s", m.model_hash, verified.verification.status)
    return verified


# -- verification ------------------------------------------------------------------------


def _first_residual(label_text: str, left: Sequence[MPoly], right: Sequence[MPoly], names: Sequence[str]) -> str:
    for k, (x, y) in enumerate(zip(left, right, strict=True)):
        difference = x - y
        if not difference.is_zero():
            return f"{label_text}[{k}]: {difference.format(names)}"
    return ""


def verify_reparam(m: CompModel, r: Reparametrization) -> Verification:
    names = m.param_names
    system = r.new_system
    alpha = list(system.substitutions)
    a = compartmental_matrix(m)
    new_matrix = system.matrix.compose(alpha) if alpha else system.matrix.embed(m.num_params)

    if r.kind == SISO_CANONICAL:
        ((j, column),) = system.input_columns
        ((_, position),) = system.outputs
        new_den, new_num = transfer_equation(system.matrix, position, column)
        (equation,) = io_equations(m)
        old_num = dict(equation.numerators)[j]
        composed_den = [c.compose(alpha) for c in new_den]
        composed_num = [c.compose(alpha) for c in new_num]
        residual = _first_residual("denominator", composed_den, equation.denominator, names) or _first_residual(
            "numerator", composed_num, old_num, names
        )
        if not residual:
            assert r.transform is not None
            left = r.transform @ a
            right = new_matrix @ r.transform
            for row in range(m.n):
                residual = _first_residual(f"T*A - Ac*T row {row + 1}", left.rows[row], right.rows[row], names)
                if residual:
                    break
        if not residual:
            tb = list(r.transform.column(j))  # type: ignore[union-attr]
            residual = _first_residual("T*b - h", tb, [c.compose(alpha) for c in column], names)
    else:
        assert r.scaling is not None
        residual = ""
        # S A = A~ S with S = diag(scaling)
        for row in range(m.n):
            left = [r.scaling[row] * a[row, col] for col in range(m.n)]
            right = [new_matrix[row, col] * r.scaling[col] for col in range(m.n)]
            residual = _first_residual(f"S*A - A~*S row {row + 1}", left, right, names)
            if residual:
                break
        if not residual:
            for i, position in system.outputs:
                for j, column in system.input_columns:
                    new_den, new_num = transfer_equation(system.matrix, position, column)
                    old_den, old_num = transfer_equation(a, i, _unit_column(m.n, j, m.num_params))
                    composed = [c.compose(alpha) for c in new_den + new_num]
                    residual = _first_residual(f"y{label(i)}/u{label(j)}", composed, old_den + old_num, names)
                    if residual:
                        break
                if residual:
                    break

    if residual:
        logger.warning("reparametrization of %s failed verification: %s", m.model_hash, residual)
        return Verification(status=verdicts.FAILED, residual=residual)
    return Verification(status=verdicts.PASSED)
