"""Dense linear algebra over Z/p, plus exact integer elimination for checks."""

from __future__ import annotations

from collections.abc import Sequence
from fractions import Fraction

from identifiability.polyring import PRIME

Matrix = Sequence[Sequence[int]]


class RowSpace:
    """Reduced row echelon form of a matrix over Z/p.

    Membership of a vector in the row space is a reduction against the pivot
    rows, so one RowSpace answers any number of gradient tests.
    """

    def __init__(self, rows: Matrix, ncols: int, p: int = PRIME):
        self.p = p
        self.ncols = ncols
        basis: list[list[int]] = []
        pivots: list[int] = []
        for row in rows:
            vector = self._reduce([x % p for x in row], basis, pivots)
            lead = next((j for j, x in enumerate(vector) if x), None)
            if lead is None:
                continue
            inv = pow(vector[lead], -1, p)
            vector = [x * inv % p for x in vector]
            # keep earlier rows reduced with respect to the new pivot
            for k, other in enumerate(basis):
                factor = other[lead]
                if factor:
                    basis[k] = [(a - factor * b) % p for a, b in zip(other, vector, strict=True)]
            basis.append(vector)
            pivots.append(lead)
        order = sorted(range(len(pivots)), key=pivots.__getitem__)
        self.basis = [basis[k] for k in order]
        self.pivots = [pivots[k] for k in order]

    def _reduce(self, vector: list[int], basis: list[list[int]], pivots: list[int]) -> list[int]:
        p = self.p
        for row, lead in zip(basis, pivots, strict=True):
            factor = vector[lead]
            if factor:
                vector = [(a - factor * b) % p for a, b in zip(vector, row, strict=True)]
        return vector

    @property
    def rank(self) -> int:
        return len(self.basis)

    def contains(self, vector: Sequence[int]) -> bool:
        reduced = self._reduce([x % self.p for x in vector], self.basis, self.pivots)
        return not any(reduced)

    def nullspace(self) -> list[list[int]]:
        """Basis of {x : M x = 0}, one vector per free column."""
        p = self.p
        free = [j for j in range(self.ncols) if j not in set(self.pivots)]
        vectors = []
        for f in free:
            x = [0] * self.ncols
            x[f] = 1
            for row, lead in zip(self.basis, self.pivots, strict=True):
                x[lead] = -row[f] % p
            vectors.append(x)
        return vectors


def rank_mod(rows: Matrix, ncols: int, p: int = PRIME) -> int:
    return RowSpace(rows, ncols, p).rank


def nullspace_mod(rows: Matrix, ncols: int, p: int = PRIME) -> list[list[int]]:
    return RowSpace(rows, ncols, p).nullspace()


def det_mod(rows: Matrix, p: int = PRIME) -> int:
    a = [[x % p for x in row] for row in rows]
    n = len(a)
    det = 1
    for k in range(n):
        pivot = next((i for i in range(k, n) if a[i][k]), None)
        if pivot is None:
            return 0
        if pivot != k:
            a[k], a[pivot] = a[pivot], a[k]
            det = -det
        det = det * a[k][k] % p
        inv = pow(a[k][k], -1, p)
        for i in range(k + 1, n):
            factor = a[i][k] * inv % p
            if factor:
                a[i] = [(x - factor * y) % p for x, y in zip(a[i], a[k], strict=True)]
    return det % p


def select_columns(rows: Matrix, keep: Sequence[int]) -> list[list[int]]:
    return [[row[j] for j in keep] for row in rows]


def exact_rank(rows: Sequence[Sequence[int | Fraction]]) -> int:
    """Rank over Q by fraction-free (Bareiss) elimination."""
    a = []
    for row in rows:
        scale = 1
        for x in row:
            if isinstance(x, Fraction):
                scale = scale * x.denominator
        a.append([int(x * scale) for x in row])
    if not a:
        return 0
    nrows, ncols = len(a), len(a[0])
    rank = 0
    previous = 1
    for col in range(ncols):
        pivot = next((i for i in range(rank, nrows) if a[i][col]), None)
        if pivot is None:
            continue
        a[rank], a[pivot] = a[pivot], a[rank]
        for i in range(rank + 1, nrows):
            for j in range(col + 1, ncols):
                a[i][j] = (a[rank][col] * a[i][j] - a[i][col] * a[rank][j]) // previous
            a[i][col] = 0
        previous = a[rank][col]
        rank += 1
        if rank == nrows:
            break
    return rank
