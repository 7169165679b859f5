import random
from collections import Counter

import numpy as np
from django.test import SimpleTestCase
from scipy import signal

from identifiability.compartments import compartmental_matrix, relabel, relabel_param, validate_model
from identifiability.io_equations import (
    DENOMINATOR,
    NUMERATOR,
    io_coefficient_map,
    io_equations,
    transfer_equation,
)
from identifiability.polyring import MPoly
from identifiability.tests import fixture_model, random_digraph_model


def model(n, edges, inputs, outputs, leaks=(), **extra):
    return validate_model(
        {
            "compartments": n,
            "edges": [list(e) for e in edges],
            "inputs": list(inputs),
            "outputs": list(outputs),
            "leaks": list(leaks),
            **extra,
        }
    )


class Loop3Equation(SimpleTestCase):
    def setUp(self):
        self.m = fixture_model("loop3")
        self.v = {name: self.m.variable(self.m.param(name)) for name in self.m.param_names}

    def k(self):
        v = self.v
        return (
            v["a01"],
            v["a02"] + v["a03"],
            v["a13"] * v["a32"] * v["a21"],
            v["a02"] * v["a03"] - v["a23"] * v["a32"],
        )

    def test_characteristic_polynomial(self):
        k1, k2, k3, k4 = self.k()
        (eq,) = io_equations(self.m)
        self.assertEqual(eq.support, (0, 1, 2))
        self.assertEqual(
            list(eq.denominator),
            [MPoly.one(7), k1 + k2, k1 * k2 + k4, k1 * k4 - k3],
        )

    def test_numerator(self):
        _, k2, _, k4 = self.k()
        (eq,) = io_equations(self.m)
        ((j, coeffs),) = eq.numerators
        self.assertEqual(j, 0)
        self.assertEqual(list(coeffs), [MPoly.one(7), k2, k4])

    def test_coefficient_map_provenance(self):
        cmap = io_coefficient_map(self.m)
        self.assertEqual(len(cmap.entries), 6)
        self.assertEqual(cmap.order, 3)
        self.assertEqual(cmap.entries[0].source, DENOMINATOR)
        self.assertEqual(cmap.entries[0].provenance(), "y1 denominator D^2")
        self.assertEqual(cmap.entries[3].source, NUMERATOR)
        self.assertEqual(cmap.entries[3].provenance(), "y1 numerator u1 D^2")
        # the leading numerator coefficient is the constant 1
        self.assertEqual(len(cmap.nonconstant()), 5)

    def test_format(self):
        (eq,) = io_equations(self.m)
        text = eq.format(self.m.param_names)
        self.assertTrue(text.startswith("D^3 y1 + (a01 + a02 + a03) D^2 y1"))
        self.assertIn("= D^2 u1 + (a02 + a03) D u1", text)


class Catenary(SimpleTestCase):
    def test_two_compartments(self):
        m = model(2, [(1, 2), (2, 1)], [1], [1], [1])
        a12, a21, a01 = (m.variable(p) for p in m.params)
        cmap = io_coefficient_map(m)
        self.assertEqual(cmap.polys, [a01 + a21 + a12, a01 * a12, MPoly.one(3), a12])


class Reachability(SimpleTestCase):
    def test_unreachable_leak_is_absent(self):
        m = model(2, [(1, 2)], [1], [1], [2])
        a21 = m.variable(m.param("a21"))
        (eq,) = io_equations(m)
        self.assertEqual(eq.support, (0,))
        cmap = io_coefficient_map(m)
        self.assertEqual(cmap.polys, [a21, MPoly.one(2)])
        self.assertTrue(all(m.param("a02").ordinal not in f.variables() for f in cmap.polys))

    def test_input_outside_support_gives_zero_numerator(self):
        m = model(2, [(1, 2)], [2], [1], [2])
        (eq,) = io_equations(m)
        ((_, coeffs),) = eq.numerators
        self.assertTrue(all(c.is_zero() for c in coeffs))


class TransferFunctionOracle(SimpleTestCase):
    """Evaluated coefficients agree with scipy's state-space conversion."""

    def check(self, m, seed):
        rng = random.Random(seed)
        values = [rng.randint(1, 9) for _ in range(m.num_params)]
        a = compartmental_matrix(m)
        numeric = np.array(a.evaluate(values), dtype=float)
        for i in m.outputs:
            for j in m.inputs:
                column = [MPoly.one(m.num_params) if r == j else MPoly.zero(m.num_params) for r in range(m.n)]
                den, num = transfer_equation(a, i, column)
                b = np.zeros((m.n, 1))
                b[j, 0] = 1.0
                c = np.zeros((1, m.n))
                c[0, i] = 1.0
                expected_num, expected_den = signal.ss2tf(numeric, b, c, np.zeros((1, 1)))
                np.testing.assert_allclose([f.evaluate(values) for f in den], expected_den, rtol=1e-9, atol=1e-9)
                np.testing.assert_allclose(
                    [f.evaluate(values) for f in num], expected_num[0][1:], rtol=1e-9, atol=1e-9
                )

    def test_fixture_models(self):
        for k, name in enumerate(("cycle4", "loop3", "exchange")):
            with self.subTest(model=name):
                self.check(fixture_model(name), seed=k)

    def test_random_models(self):
        rng = random.Random(21)
        for trial in range(10):
            n = rng.randint(2, 4)
            pairs = [(s, t) for s in range(1, n + 1) for t in range(1, n + 1) if s != t]
            edges = rng.sample(pairs, rng.randint(1, len(pairs)))
            leaks = [c for c in range(1, n + 1) if rng.random() < 0.5]
            m = model(n, edges, [rng.randint(1, n)], sorted({rng.randint(1, n), 1}), leaks)
            with self.subTest(trial=trial):
                self.check(m, seed=trial)


class Relabelling(SimpleTestCase):
    def test_coefficient_map_follows_the_permutation(self):
        rng = random.Random(13)
        models = [fixture_model(name) for name in ("cycle4", "loop3", "exchange")]
        models += [random_digraph_model(rng, rng.randint(2, 4)) for _ in range(15)]
        for m in models:
            p = list(range(m.n))
            rng.shuffle(p)
            moved = relabel(m, p)
            images = [moved.variable(moved.param(relabel_param(m, q, p))) for q in m.params]
            expected = Counter(f.compose(images) for f in io_coefficient_map(m).polys)
            with self.subTest(model=m.to_dict(), permutation=p):
                self.assertEqual(Counter(io_coefficient_map(moved).polys), expected)
