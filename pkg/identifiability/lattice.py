"""Integer lattices: Hermite normal form and integer kernels."""

from __future__ import annotations

from collections.abc import Sequence


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with a*x + b*y = g = gcd(a, b) >= 0."""
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_x, x = x, old_x - q * x
        old_y, y = y, old_y - q * y
    if old_r < 0:
        return -old_r, -old_x, -old_y
    return old_r, old_x, old_y


def _combine(u: list[int], v: list[int], a: int, b: int) -> list[int]:
    return [a * x + b * y for x, y in zip(u, v, strict=True)]


def hermite_normal_form(rows: Sequence[Sequence[int]]) -> list[list[int]]:
    """Row-style Hermite normal form of the lattice spanned by ``rows``.

    Pivots are positive, entries above a pivot lie in [0, pivot), zero rows
    are dropped. The result depends only on the lattice.
    """
    a = [list(row) for row in rows if any(row)]
    if not a:
        return []
    ncols = len(a[0])
    r = 0
    for col in range(ncols):
        if r == len(a):
            break
        for i in range(r + 1, len(a)):
            if not a[i][col]:
                continue
            p, q = a[r][col], a[i][col]
            g, x, y = xgcd(p, q)
            a[r], a[i] = _combine(a[r], a[i], x, y), _combine(a[r], a[i], -q // g, p // g)
        if not a[r][col]:
            continue
        if a[r][col] < 0:
            a[r] = [-x for x in a[r]]
        pivot = a[r][col]
        for k in range(r):
            factor = a[k][col] // pivot
            if factor:
                a[k] = [x - factor * y for x, y in zip(a[k], a[r], strict=True)]
        r += 1
    return [row for row in a[:r] if any(row)]


def integer_kernel(matrix: Sequence[Sequence[int]], ncols: int) -> list[list[int]]:
    """Hermite-reduced basis of {x in Z^ncols : matrix @ x = 0}."""
    nrows = len(matrix)
    augmented = [
        [matrix[i][j] for i in range(nrows)] + [int(j == k) for k in range(ncols)]
        for j in range(ncols)
    ]
    reduced = hermite_normal_form(augmented)
    kernel = [row[nrows:] for row in reduced if not any(row[:nrows])]
    return hermite_normal_form(kernel)


def in_lattice(vector: Sequence[int], basis: Sequence[Sequence[int]]) -> bool:
    return hermite_normal_form([*basis, vector]) == hermite_normal_form(basis)


def lattice_coordinates(vector: Sequence[int], basis: Sequence[Sequence[int]]) -> list[int] | None:
    """Integer coordinates of ``vector`` in a Hermite-reduced basis, or None."""
    remaining = list(vector)
    coordinates = []
    for row in basis:
        col = next(j for j, x in enumerate(row) if x)
        factor, rest = divmod(remaining[col], row[col])
        if rest:
            return None
        coordinates.append(factor)
        if factor:
            remaining = [r - factor * x for r, x in zip(remaining, row, strict=True)]
    if any(remaining):
        return None
    return coordinates
