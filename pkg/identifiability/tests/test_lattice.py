import math
import random

import sympy
from django.test import SimpleTestCase

from identifiability.lattice import (
    hermite_normal_form,
    in_lattice,
    integer_kernel,
    lattice_coordinates,
    xgcd,
)


class Hermite(SimpleTestCase):
    def test_xgcd(self):
        for a, b in [(12, 18), (-4, 6), (0, 5), (7, 0), (-3, -9)]:
            g, x, y = xgcd(a, b)
            self.assertEqual(g, math.gcd(a, b))
            self.assertEqual(a * x + b * y, g)

    def test_form(self):
        self.assertEqual(hermite_normal_form([[2, 4], [1, 3]]), [[1, 1], [0, 2]])
        self.assertEqual(hermite_normal_form([[0, 0], [0, -3]]), [[0, 3]])
        self.assertEqual(hermite_normal_form([]), [])

    def test_volume_matches_determinant(self):
        rng = random.Random(3)
        for _ in range(20):
            rows = [[rng.randint(-6, 6) for _ in range(3)] for _ in range(3)]
            det = sympy.Matrix(rows).det()
            if det == 0:
                continue
            form = hermite_normal_form(rows)
            self.assertEqual(len(form), 3)
            self.assertEqual(math.prod(form[k][k] for k in range(3)), abs(det))
            for row in rows:
                self.assertTrue(in_lattice(row, form))


class Kernels(SimpleTestCase):
    def test_saturated_basis(self):
        kernel = integer_kernel([[2, 4, 6]], 3)
        self.assertEqual(kernel, [[1, 1, -1], [0, 3, -2]])
        self.assertEqual(lattice_coordinates([-2, 1, 0], kernel), [-2, 1])
        self.assertIsNone(lattice_coordinates([0, 1, 0], kernel))

    def test_full_rank_has_no_kernel(self):
        self.assertEqual(integer_kernel([[1, 0], [0, 1]], 2), [])

    def test_against_sympy_nullspace(self):
        rng = random.Random(11)
        for _ in range(25):
            nrows, ncols = rng.randint(1, 3), rng.randint(2, 5)
            matrix = [[rng.randint(-3, 3) for _ in range(ncols)] for _ in range(nrows)]
            kernel = integer_kernel(matrix, ncols)
            reference = sympy.Matrix(matrix)
            with self.subTest(matrix=matrix):
                self.assertEqual(len(kernel), ncols - reference.rank())
                for vector in kernel:
                    self.assertTrue(all(v == 0 for v in reference * sympy.Matrix(vector)))
                for vector in reference.nullspace():
                    scale = math.lcm(*(int(sympy.fraction(v)[1]) for v in vector))
                    self.assertTrue(in_lattice([int(v * scale) for v in vector], kernel))
