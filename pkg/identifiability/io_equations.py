"""Input-output equations and the coefficient map.

For an output compartment i let H be the set of compartments with a directed
path to i. Nothing outside H influences x_i, so

    det(D*I - A_H) y_i = sum over inputs j in H of adj(D*I - A_H)[i, j] u_j

with A_H the principal submatrix on H and D the differential operator. The
adjugate entry is (-1)^(r+c) times the minor with row r (position of j in H)
and column c (position of i in H) removed. For strongly connected models H is
every compartment.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass

from identifiability.compartments import CompModel, compartmental_matrix, graph_props, label
from identifiability.exceptions import NoInputs
from identifiability.polyring import (
    MPoly,
    PolyMatrix,
    determinant,
    minor_det,
    operator_matrix,
)

logger = logging.getLogger(__name__)

DENOMINATOR = "denominator"
NUMERATOR = "numerator"


@dataclass(frozen=True)
class CoefficientEntry:
    polynomial: MPoly
    output: int
    source: str
    input: int | None
    power: int

    def provenance(self) -> str:
        where = "denominator" if self.input is None else f"numerator u{label(self.input)}"
        return f"y{label(self.output)} {where} D^{self.power}"


@dataclass(frozen=True)
class CoefficientMap:
    entries: tuple[CoefficientEntry, ...]
    num_params: int
    # largest io-equation order; bounds the total degree of every entry
    order: int = 0

    @property
    def polys(self) -> list[MPoly]:
        return [e.polynomial for e in self.entries]

    def nonconstant(self) -> list[MPoly]:
        return [f for f in self.polys if not f.is_constant()]

    def degree_bound(self) -> int:
        return max((f.total_degree() for f in self.polys), default=0)


@dataclass(frozen=True)
class IOEquation:
    output: int
    support: tuple[int, ...]
    # highest power first; denominator[0] is the constant 1
    denominator: tuple[MPoly, ...]
    numerators: tuple[tuple[int, tuple[MPoly, ...]], ...]

    @property
    def order(self) -> int:
        return len(self.support)

    def format(self, names: Sequence[str]) -> str:
        y = f"y{label(self.output)}"
        left = _operator_sum(self.denominator, self.order, y, names)
        right_parts = [
            _operator_sum(coeffs, self.order - 1, f"u{label(j)}", names)
            for j, coeffs in self.numerators
        ]
        right = " + ".join(part for part in right_parts if part != "0") or "0"
        return f"{left} = {right}"


def _operator_sum(coeffs: Sequence[MPoly], degree: int, signal: str, names: Sequence[str]) -> str:
    pieces = []
    for k, c in enumerate(coeffs):
        power = degree - k
        if c.is_zero():
            continue
        operator = signal if power == 0 else (f"D {signal}" if power == 1 else f"D^{power} {signal}")
        if c == 1:
            pieces.append(operator)
        elif c.is_monomial() or c.is_constant():
            pieces.append(f"{c.format(names)} {operator}")
        else:
            pieces.append(f"({c.format(names)}) {operator}")
    return " + ".join(pieces).replace("+ -", "- ") or "0"


def transfer_equation(
    matrix: PolyMatrix, output: int, input_column: Sequence[MPoly]
) -> tuple[list[MPoly], list[MPoly]]:
    """Denominator and numerator coefficients of y = x_output for x' = Ax + b u.

    Uses the full matrix; coefficients are listed highest power first.
    """
    op = operator_matrix(matrix)
    n = matrix.nrows
    denominator = determinant(op).split_last(n)
    numerator = [MPoly.zero(matrix.nvars) for _ in range(n)]
    for j, b in enumerate(input_column):
        if b.is_zero():
            continue
        sign = -1 if (j + output) % 2 else 1
        minor = minor_det(op, j, output)
        numerator = [acc + c * b * sign for acc, c in zip(numerator, minor, strict=True)]
    return denominator, numerator


def io_equations(m: CompModel, matrix: PolyMatrix | None = None) -> list[IOEquation]:
    if not m.inputs:
        msg = "models without inputs are not analysed"
        raise NoInputs(msg)
    a = compartmental_matrix(m) if matrix is None else matrix
    props = graph_props(m)
    denominators: dict[tuple[int, ...], tuple[PolyMatrix, tuple[MPoly, ...]]] = {}
    equations = []
    for i in m.outputs:
        support = tuple(sorted(props.output_reachable[i]))
        if support not in denominators:
            op = operator_matrix(a.principal(support))
            denominators[support] = (op, tuple(determinant(op).split_last(len(support))))
        op, denominator = denominators[support]
        col = support.index(i)
        numerators = []
        for j in m.inputs:
            if j not in support:
                coeffs = tuple(MPoly.zero(a.nvars) for _ in support)
            else:
                row = support.index(j)
                minor = minor_det(op, row, col)
                coeffs = tuple(c if (row + col) % 2 == 0 else -c for c in minor)
            numerators.append((j, coeffs))
        equations.append(
            IOEquation(
                output=i,
                support=support,
                denominator=denominator,
                numerators=tuple(numerators),
            )
        )
    return equations


def coefficient_map_of(equations: Sequence[IOEquation], num_params: int) -> CoefficientMap:
    entries = []
    for eq in equations:
        order = eq.order
        for k, c in enumerate(eq.denominator[1:], start=1):
            entries.append(CoefficientEntry(c, eq.output, DENOMINATOR, None, order - k))
        for j, coeffs in eq.numerators:
            for k, c in enumerate(coeffs):
                entries.append(CoefficientEntry(c, eq.output, NUMERATOR, j, order - 1 - k))
    return CoefficientMap(
        entries=tuple(entries),
        num_params=num_params,
        order=max((eq.order for eq in equations), default=0),
    )


def io_coefficient_map(m: CompModel, matrix: PolyMatrix | None = None) -> CoefficientMap:
    cmap = coefficient_map_of(io_equations(m, matrix), m.num_params)
    logger.debug(
        "coefficient map of %s: %d entries in %d parameters",
        m.model_hash,
        len(cmap.entries),
        cmap.num_params,
    )
    return cmap
