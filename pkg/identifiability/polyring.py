"""Sparse multivariate polynomials over the integers.

Polynomials are dictionaries from exponent tuples to nonzero integer
coefficients. Exponents may be negative (Laurent monomials) so that scaling
reparametrizations can be written down; determinants and division only ever
see ordinary polynomials.

The differential operator of the io-equations is modelled as one extra
variable appended after the parameters (see ``operator_matrix``).
"""

from __future__ import annotations

import itertools
import random
from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from identifiability.exceptions import (
    IndexOutOfRange,
    InexactDivision,
    NonSquareMatrix,
    VariableCountMismatch,
)

# Mersenne prime 2^61 - 1.
PRIME = (1 << 61) - 1

Exponents = tuple[int, ...]


def _add_exponents(a: Exponents, b: Exponents) -> Exponents:
    return tuple(x + y for x, y in zip(a, b, strict=True))


class MPoly:
    __slots__ = ("_hash", "nvars", "terms")

    nvars: int
    terms: dict[Exponents, int]

    def __init__(self, nvars: int, terms: Mapping[Exponents, int] | None = None):
        clean: dict[Exponents, int] = {}
        for exps, coeff in (terms or {}).items():
            if len(exps) != nvars:
                msg = f"exponent vector {exps} does not have {nvars} entries"
                raise VariableCountMismatch(msg)
            if coeff:
                key = tuple(exps)
                clean[key] = clean.get(key, 0) + coeff
                if not clean[key]:
                    del clean[key]
        self.nvars = nvars
        self.terms = clean
        self._hash: int | None = None

    @classmethod
    def _raw(cls, nvars: int, terms: dict[Exponents, int]) -> MPoly:
        poly = cls.__new__(cls)
        poly.nvars = nvars
        poly.terms = terms
        poly._hash = None
        return poly

    @classmethod
    def zero(cls, nvars: int) -> MPoly:
        return cls._raw(nvars, {})

    @classmethod
    def constant(cls, value: int, nvars: int) -> MPoly:
        return cls._raw(nvars, {(0,) * nvars: value} if value else {})

    @classmethod
    def one(cls, nvars: int) -> MPoly:
        return cls.constant(1, nvars)

    @classmethod
    def variable(cls, index: int, nvars: int) -> MPoly:
        if not 0 <= index < nvars:
            msg = f"variable {index} outside a ring of {nvars} variables"
            raise VariableCountMismatch(msg)
        exps = [0] * nvars
        exps[index] = 1
        return cls._raw(nvars, {tuple(exps): 1})

    @classmethod
    def monomial(cls, exponents: Sequence[int], coeff: int = 1) -> MPoly:
        return cls(len(exponents), {tuple(exponents): coeff})

    # -- coercion and comparison ------------------------------------------

    def _coerce(self, other: Any) -> MPoly:
        if isinstance(other, MPoly):
            if other.nvars != self.nvars:
                msg = f"cannot combine polynomials in {self.nvars} and {other.nvars} variables"
                raise VariableCountMismatch(msg)
            return other
        if isinstance(other, int):
            return MPoly.constant(other, self.nvars)
        return NotImplemented

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            return self.terms == ({(0,) * self.nvars: other} if other else {})
        if not isinstance(other, MPoly):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self.terms)

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: Any) -> MPoly:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        result = dict(self.terms)
        for exps, coeff in other.terms.items():
            value = result.get(exps, 0) + coeff
            if value:
                result[exps] = value
            else:
                result.pop(exps, None)
        return MPoly._raw(self.nvars, result)

    __radd__ = __add__

    def __neg__(self) -> MPoly:
        return MPoly._raw(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: Any) -> MPoly:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: Any) -> MPoly:
        return (-self) + other

    def __mul__(self, other: Any) -> MPoly:
        if isinstance(other, int):
            if not other:
                return MPoly.zero(self.nvars)
            return MPoly._raw(self.nvars, {e: c * other for e, c in self.terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        result: dict[Exponents, int] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                exps = _add_exponents(e1, e2)
                value = result.get(exps, 0) + c1 * c2
                if value:
                    result[exps] = value
                else:
                    del result[exps]
        return MPoly._raw(self.nvars, result)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> MPoly:
        if k < 0:
            if len(self.terms) != 1:
                msg = "only monomials have negative powers"
                raise InexactDivision(msg)
            ((exps, coeff),) = self.terms.items()
            if coeff not in (1, -1):
                msg = f"coefficient {coeff} is not a unit"
                raise InexactDivision(msg)
            sign = coeff if k % 2 else 1
            return MPoly._raw(self.nvars, {tuple(e * k for e in exps): sign})
        result = MPoly.one(self.nvars)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def exact_div(self, divisor: MPoly) -> MPoly:
        """Divide, raising InexactDivision unless the remainder is zero.

        Classic leading-term division in lex order on exponent tuples.
        """
        divisor = self._coerce(divisor)
        if not divisor.terms:
            msg = "division by the zero polynomial"
            raise ZeroDivisionError(msg)
        lead_exps, lead_coeff = max(divisor.terms.items())
        laurent = self.is_laurent() or divisor.is_laurent()
        remainder = dict(self.terms)
        quotient: dict[Exponents, int] = {}
        while remainder:
            exps = max(remainder)
            coeff = remainder[exps]
            q_exps = tuple(a - b for a, b in zip(exps, lead_exps, strict=True))
            if coeff % lead_coeff or (not laurent and min(q_exps, default=0) < 0):
                msg = "polynomial division leaves a remainder"
                raise InexactDivision(msg)
            q_coeff = coeff // lead_coeff
            quotient[q_exps] = q_coeff
            for d_exps, d_coeff in divisor.terms.items():
                key = _add_exponents(q_exps, d_exps)
                value = remainder.get(key, 0) - q_coeff * d_coeff
                if value:
                    remainder[key] = value
                else:
                    del remainder[key]
        return MPoly._raw(self.nvars, quotient)

    # -- structure -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        zero = (0,) * self.nvars
        return all(exps == zero for exps in self.terms)

    def constant_value(self) -> int:
        return self.terms.get((0,) * self.nvars, 0)

    def is_laurent(self) -> bool:
        return any(e < 0 for exps in self.terms for e in exps)

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(exps) for exps in self.terms)

    def degree_in(self, index: int) -> int:
        return max((exps[index] for exps in self.terms), default=-1)

    def variables(self) -> set[int]:
        return {i for exps in self.terms for i, e in enumerate(exps) if e}

    def exponent_vectors(self) -> list[Exponents]:
        return sorted(self.terms)

    def derivative(self, index: int) -> MPoly:
        result: dict[Exponents, int] = {}
        for exps, coeff in self.terms.items():
            e = exps[index]
            if e:
                lowered = list(exps)
                lowered[index] = e - 1
                result[tuple(lowered)] = coeff * e
        return MPoly._raw(self.nvars, result)

    def embed(self, nvars: int) -> MPoly:
        """The same polynomial in a ring with extra trailing variables."""
        if nvars < self.nvars:
            msg = f"cannot embed {self.nvars} variables into {nvars}"
            raise VariableCountMismatch(msg)
        pad = (0,) * (nvars - self.nvars)
        return MPoly._raw(nvars, {exps + pad: c for exps, c in self.terms.items()})

    def split_last(self, degree: int) -> list[MPoly]:
        """Coefficients of the last variable, highest power first.

        The result lives in the ring without that variable and has
        ``degree + 1`` entries.
        """
        nvars = self.nvars - 1
        buckets: list[dict[Exponents, int]] = [{} for _ in range(degree + 1)]
        for exps, coeff in self.terms.items():
            power = exps[-1]
            if not 0 <= power <= degree:
                msg = f"power {power} of the last variable exceeds {degree}"
                raise VariableCountMismatch(msg)
            buckets[degree - power][exps[:-1]] = coeff
        return [MPoly._raw(nvars, bucket) for bucket in buckets]

    def compose(self, images: Sequence[MPoly]) -> MPoly:
        """Substitute ``images[i]`` for variable i."""
        if len(images) != self.nvars:
            msg = f"{len(images)} images for {self.nvars} variables"
            raise VariableCountMismatch(msg)
        if not images:
            return self
        target = images[0].nvars
        result = MPoly.zero(target)
        powers: dict[tuple[int, int], MPoly] = {}
        for exps, coeff in self.terms.items():
            term = MPoly.constant(coeff, target)
            for i, e in enumerate(exps):
                if e:
                    if (i, e) not in powers:
                        powers[i, e] = images[i] ** e
                    term = term * powers[i, e]
            result = result + term
        return result

    # -- evaluation ------------------------------------------------------------

    def evaluate(self, values: Sequence[Any]) -> Any:
        """Evaluate at arbitrary ring elements (ints, Fractions, floats)."""
        total: Any = 0
        for exps, coeff in self.terms.items():
            term: Any = coeff
            for v, e in zip(values, exps, strict=True):
                if e:
                    term = term * (Fraction(v) ** e if e < 0 and isinstance(v, int) else v**e)
            total = total + term
        return total

    def evaluate_mod(self, values: Sequence[int], p: int = PRIME) -> int:
        total = 0
        for exps, coeff in self.terms.items():
            term = coeff % p
            for v, e in zip(values, exps, strict=True):
                if e:
                    term = term * pow(v, e, p) % p
            total += term
        return total % p

    # -- printing --------------------------------------------------------------

    def sorted_terms(self) -> list[tuple[Exponents, int]]:
        """Terms in printing order: higher total degree first, then lex."""
        return sorted(self.terms.items(), key=lambda t: (-sum(t[0]), tuple(-e for e in t[0])))

    def format(self, names: Sequence[str]) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for exps, coeff in self.sorted_terms():
            factors = []
            for name, e in zip(names, exps, strict=True):
                if e == 1:
                    factors.append(name)
                elif e:
                    factors.append(f"{name}^{e}" if e > 0 else f"{name}^({e})")
            magnitude = abs(coeff)
            if not factors:
                body = str(magnitude)
            elif magnitude == 1:
                body = "*".join(factors)
            else:
                body = "*".join([str(magnitude), *factors])
            sign = "-" if coeff < 0 else "+"
            pieces.append((sign, body))
        first_sign, first_body = pieces[0]
        text = ("-" if first_sign == "-" else "") + first_body
        for sign, body in pieces[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self) -> str:
        return f"MPoly({self.format([f'x{i}' for i in range(self.nvars)])})"


class PolyMatrix:
    """Immutable matrix of polynomials sharing one ring."""

    __slots__ = ("ncols", "nrows", "nvars", "rows")

    def __init__(self, rows: Iterable[Iterable[MPoly]], nvars: int):
        self.rows: tuple[tuple[MPoly, ...], ...] = tuple(tuple(r) for r in rows)
        self.nvars = nvars
        self.nrows = len(self.rows)
        self.ncols = len(self.rows[0]) if self.rows else 0
        for row in self.rows:
            if len(row) != self.ncols:
                msg = "ragged matrix rows"
                raise ValueError(msg)
            for entry in row:
                if entry.nvars != nvars:
                    msg = f"matrix entry in {entry.nvars} variables, expected {nvars}"
                    raise VariableCountMismatch(msg)

    @classmethod
    def identity(cls, n: int, nvars: int) -> PolyMatrix:
        return cls(
            (
                (MPoly.one(nvars) if i == j else MPoly.zero(nvars) for j in range(n))
                for i in range(n)
            ),
            nvars,
        )

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def __getitem__(self, index: tuple[int, int]) -> MPoly:
        i, j = index
        return self.rows[i][j]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return self.nvars == other.nvars and self.rows == other.rows

    def __hash__(self) -> int:
        return hash((self.nvars, self.rows))

    def __add__(self, other: PolyMatrix) -> PolyMatrix:
        return PolyMatrix(
            (tuple(a + b for a, b in zip(r, s, strict=True)) for r, s in zip(self.rows, other.rows, strict=True)),
            self.nvars,
        )

    def __sub__(self, other: PolyMatrix) -> PolyMatrix:
        return PolyMatrix(
            (tuple(a - b for a, b in zip(r, s, strict=True)) for r, s in zip(self.rows, other.rows, strict=True)),
            self.nvars,
        )

    def __matmul__(self, other: PolyMatrix) -> PolyMatrix:
        if self.ncols != other.nrows:
            msg = f"cannot multiply {self.shape} by {other.shape}"
            raise ValueError(msg)
        cols = list(zip(*other.rows, strict=True)) if other.rows else []
        zero = MPoly.zero(self.nvars)
        return PolyMatrix(
            (
                tuple(sum((a * b for a, b in zip(row, col, strict=True)), zero) for col in cols)
                for row in self.rows
            ),
            self.nvars,
        )

    def column(self, j: int) -> tuple[MPoly, ...]:
        return tuple(row[j] for row in self.rows)

    def column_sums(self) -> tuple[MPoly, ...]:
        zero = MPoly.zero(self.nvars)
        return tuple(sum(self.column(j), zero) for j in range(self.ncols))

    def trace(self) -> MPoly:
        return sum((self.rows[i][i] for i in range(min(self.shape))), MPoly.zero(self.nvars))

    def minor(self, drop_row: int, drop_col: int) -> PolyMatrix:
        return PolyMatrix(
            (
                tuple(e for j, e in enumerate(row) if j != drop_col)
                for i, row in enumerate(self.rows)
                if i != drop_row
            ),
            self.nvars,
        )

    def principal(self, indices: Sequence[int]) -> PolyMatrix:
        """Restriction to the given rows and columns, in the given order."""
        return PolyMatrix(
            (tuple(self.rows[i][j] for j in indices) for i in indices), self.nvars
        )

    def embed(self, nvars: int) -> PolyMatrix:
        return PolyMatrix((tuple(e.embed(nvars) for e in row) for row in self.rows), nvars)

    def compose(self, images: Sequence[MPoly]) -> PolyMatrix:
        target = images[0].nvars if images else self.nvars
        return PolyMatrix((tuple(e.compose(images) for e in row) for row in self.rows), target)

    def evaluate_mod(self, values: Sequence[int], p: int = PRIME) -> list[list[int]]:
        return [[e.evaluate_mod(values, p) for e in row] for row in self.rows]

    def evaluate(self, values: Sequence[Any]) -> list[list[Any]]:
        return [[e.evaluate(values) for e in row] for row in self.rows]

    def format(self, names: Sequence[str]) -> list[list[str]]:
        return [[e.format(names) for e in row] for row in self.rows]


# -- determinants ---------------------------------------------------------------


def _require_square(matrix: PolyMatrix) -> None:
    if matrix.nrows != matrix.ncols:
        msg = f"determinant of a {matrix.nrows}x{matrix.ncols} matrix"
        raise NonSquareMatrix(msg)


def laplace_determinant(matrix: PolyMatrix) -> MPoly:
    """Cofactor expansion along the first row; fine for n <= 4."""
    _require_square(matrix)
    n = matrix.nrows
    if n == 0:
        return MPoly.one(matrix.nvars)
    if n == 1:
        return matrix[0, 0]
    total = MPoly.zero(matrix.nvars)
    for j, entry in enumerate(matrix.rows[0]):
        if entry.is_zero():
            continue
        cofactor = laplace_determinant(matrix.minor(0, j)) * entry
        total = total + cofactor if j % 2 == 0 else total - cofactor
    return total


def bareiss_determinant(matrix: PolyMatrix) -> MPoly:
    """Fraction-free elimination with row pivoting."""
    _require_square(matrix)
    n = matrix.nrows
    nvars = matrix.nvars
    if n == 0:
        return MPoly.one(nvars)
    a = [list(row) for row in matrix.rows]
    sign = 1
    previous = MPoly.one(nvars)
    for k in range(n - 1):
        if a[k][k].is_zero():
            swap = next((i for i in range(k + 1, n) if not a[i][k].is_zero()), None)
            if swap is None:
                return MPoly.zero(nvars)
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        pivot = a[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (pivot * a[i][j] - a[i][k] * a[k][j]).exact_div(previous)
        previous = pivot
    return a[n - 1][n - 1] * sign


def determinant(matrix: PolyMatrix, method: str = "auto") -> MPoly:
    """Bareiss for ordinary polynomials, cofactor expansion for tiny or
    Laurent matrices (where exact division is not available)."""
    if method == "laplace" or (
        method == "auto"
        and (matrix.nrows <= 3 or any(e.is_laurent() for row in matrix.rows for e in row))
    ):
        return laplace_determinant(matrix)
    return bareiss_determinant(matrix)


def operator_matrix(matrix: PolyMatrix) -> PolyMatrix:
    """``D*I - A`` with D a new last variable."""
    _require_square(matrix)
    nvars = matrix.nvars + 1
    d = MPoly.variable(nvars - 1, nvars)
    return PolyMatrix(
        (
            tuple(
                (d - e.embed(nvars)) if i == j else -e.embed(nvars)
                for j, e in enumerate(row)
            )
            for i, row in enumerate(matrix.rows)
        ),
        nvars,
    )


def char_poly(matrix: PolyMatrix) -> list[MPoly]:
    """Coefficients of det(D*I - A) from D^n down to D^0."""
    _require_square(matrix)
    return determinant(operator_matrix(matrix)).split_last(matrix.nrows)


def minor_det(op_matrix: PolyMatrix, drop_row: int, drop_col: int) -> list[MPoly]:
    """Determinant of an operator matrix with one row and column removed.

    Returns the coefficients of D^(n-1) down to D^0 in the parameter ring.
    """
    _require_square(op_matrix)
    n = op_matrix.nrows
    if not (0 <= drop_row < n and 0 <= drop_col < n):
        msg = f"cannot drop row {drop_row + 1}, column {drop_col + 1} of a {n}x{n} matrix"
        raise IndexOutOfRange(msg)
    return determinant(op_matrix.minor(drop_row, drop_col)).split_last(max(n - 1, 0))


# -- the prime field -------------------------------------------------------------


@dataclass(frozen=True)
class FieldPoint:
    values: tuple[int, ...]
    seed: int
    trial: int
    prime: int = PRIME


def field_points(nvars: int, seed: int, p: int = PRIME) -> Iterator[FieldPoint]:
    """Endless deterministic stream of points with residues in [1, p - 1]."""
    rng = random.Random(seed)
    for trial in itertools.count():
        yield FieldPoint(
            values=tuple(rng.randrange(1, p) for _ in range(nvars)),
            seed=seed,
            trial=trial,
            prime=p,
        )


def sample_points(nvars: int, trials: int, seed: int) -> list[FieldPoint]:
    return list(itertools.islice(field_points(nvars, seed), trials))


def eval_mod_p(f: MPoly, pt: FieldPoint) -> int:
    if f.nvars != len(pt.values):
        msg = f"point has {len(pt.values)} coordinates, polynomial {f.nvars} variables"
        raise VariableCountMismatch(msg)
    return f.evaluate_mod(pt.values, pt.prime)


class Dual:
    """Forward-mode dual number over Z/p carrying a full gradient."""

    __slots__ = ("grad", "p", "value")

    def __init__(self, value: int, grad: Sequence[int], p: int = PRIME):
        self.value = value % p
        self.grad = tuple(g % p for g in grad)
        self.p = p

    @classmethod
    def seed_variable(cls, index: int, value: int, nvars: int, p: int = PRIME) -> Dual:
        grad = [0] * nvars
        grad[index] = 1
        return cls(value, grad, p)

    def __add__(self, other: Dual) -> Dual:
        return Dual(
            self.value + other.value,
            [a + b for a, b in zip(self.grad, other.grad, strict=True)],
            self.p,
        )

    def __mul__(self, other: Dual | int) -> Dual:
        if isinstance(other, int):
            return Dual(self.value * other, [g * other for g in self.grad], self.p)
        return Dual(
            self.value * other.value,
            [
                a * other.value + b * self.value
                for a, b in zip(self.grad, other.grad, strict=True)
            ],
            self.p,
        )

    def inverse(self) -> Dual:
        inv = pow(self.value, -1, self.p)
        scale = -inv * inv
        return Dual(inv, [g * scale for g in self.grad], self.p)

    def __pow__(self, k: int) -> Dual:
        base = self.inverse() if k < 0 else self
        k = abs(k)
        result = Dual(1, [0] * len(self.grad), self.p)
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result


def dual_evaluate(f: MPoly, pt: FieldPoint) -> Dual:
    nvars = len(pt.values)
    variables = [Dual.seed_variable(i, v, nvars, pt.prime) for i, v in enumerate(pt.values)]
    total = Dual(0, [0] * nvars, pt.prime)
    for exps, coeff in f.terms.items():
        term = Dual(coeff, [0] * nvars, pt.prime)
        for var, e in zip(variables, exps, strict=True):
            if e:
                term = term * var**e
        total = total + term
    return total


class JacobianEvaluator:
    """Symbolic partial derivatives, computed once and evaluated per point."""

    def __init__(self, polys: Sequence[MPoly], nvars: int):
        self.nvars = nvars
        self.polys = tuple(polys)
        self._partials = [
            [(i, f.derivative(i)) for i in sorted(f.variables())] for f in self.polys
        ]

    def at(self, pt: FieldPoint) -> list[list[int]]:
        rows = []
        for partials in self._partials:
            row = [0] * self.nvars
            for i, partial in partials:
                row[i] = partial.evaluate_mod(pt.values, pt.prime)
            rows.append(row)
        return rows

    def exact_at(self, values: Sequence[int]) -> list[list[Any]]:
        rows = []
        for partials in self._partials:
            row: list[Any] = [0] * self.nvars
            for i, partial in partials:
                row[i] = partial.evaluate(values)
            rows.append(row)
        return rows


def jacobian_eval(
    fs: Sequence[MPoly], pt: FieldPoint, method: str = "symbolic"
) -> list[list[int]]:
    nvars = len(pt.values)
    for f in fs:
        if f.nvars != nvars:
            msg = f"point has {nvars} coordinates, polynomial {f.nvars} variables"
            raise VariableCountMismatch(msg)
    if method == "dual":
        return [list(dual_evaluate(f, pt).grad) for f in fs]
    return JacobianEvaluator(fs, nvars).at(pt)
