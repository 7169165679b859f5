import dataclasses

from django.test import SimpleTestCase

from identifiability import verdicts
from identifiability.compartments import validate_model
from identifiability.engine import local_identifiability
from identifiability.exceptions import NotObservable, NotSISO
from identifiability.families import CATENARY, DIRECTED_CYCLE, MAMMILLARY, FamilySpec, family_models
from identifiability.polyring import MPoly, PolyMatrix
from identifiability.reparam import (
    SCALING_QUOTIENT,
    SISO_CANONICAL,
    NotApplicable,
    companion_matrix,
    markov_parameters,
    scaling_reparam,
    siso_canonical_reparam,
    verify_reparam,
)
from identifiability.tests import fixture_model


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


class Companion(SimpleTestCase):
    def test_markov_parameters(self):
        p = [MPoly.variable(k, 6) for k in range(3)]
        q = [MPoly.variable(3 + k, 6) for k in range(3)]
        h1, h2, h3 = markov_parameters(p, q)
        self.assertEqual(h1, q[2])
        self.assertEqual(h2, q[1] - p[2] * q[2])
        self.assertEqual(h3, q[0] - p[2] * h2 - p[1] * h1)

    def test_companion_shape(self):
        p = [MPoly.variable(k, 2) for k in range(2)]
        a = companion_matrix(p, 2)
        self.assertEqual(a.rows[0], (MPoly.zero(2), MPoly.one(2)))
        self.assertEqual(a.rows[1], (-p[0], -p[1]))


class CanonicalForm(SimpleTestCase):
    def setUp(self):
        self.m = fixture_model("loop3")
        self.r = siso_canonical_reparam(self.m)
        self.v = {name: self.m.variable(self.m.param(name)) for name in self.m.param_names}

    def test_verified(self):
        self.assertEqual(self.r.kind, SISO_CANONICAL)
        self.assertTrue(self.r.verification.passed)
        self.assertEqual(self.r.new_system.param_names, ("p0", "p1", "p2", "q0", "q1", "q2"))

    def test_transform_rows(self):
        v = self.v
        t = self.r.transform
        zero, one = MPoly.zero(7), MPoly.one(7)
        self.assertEqual(t.rows[0], (one, zero, zero))
        self.assertEqual(t.rows[1], (-v["a01"], zero, v["a13"]))
        self.assertEqual(
            t.rows[2],
            (v["a01"] ** 2, v["a13"] * v["a32"], -v["a01"] * v["a13"] - v["a03"] * v["a13"]),
        )

    def test_input_column_and_bottom_row(self):
        v = self.v
        k1 = v["a01"]
        k2 = v["a02"] + v["a03"]
        k3 = v["a13"] * v["a32"] * v["a21"]
        k4 = v["a02"] * v["a03"] - v["a23"] * v["a32"]
        system = self.r.new_system
        alpha = list(system.substitutions)
        ((j, column),) = system.input_columns
        self.assertEqual(j, 0)
        self.assertEqual([c.compose(alpha) for c in column], [MPoly.one(7), -k1, k1 * k1])
        bottom = [c.compose(alpha) for c in system.matrix.rows[2]]
        self.assertEqual(bottom, [-(k1 * k4 - k3), -(k1 * k2 + k4), -(k1 + k2)])

    def test_lines(self):
        lines = self.r.state_definitions()
        self.assertEqual(lines[0], "X1 = x1")
        self.assertEqual(lines[1], "X2 = -a01*x1 + a13*x3")
        system = self.r.system_lines()
        self.assertEqual(system[0], "dX1/dt = X2 + h1*u1")
        self.assertEqual(system[-1], "y1 = X1")
        self.assertIn("p2 = a01 + a02 + a03", self.r.parameter_lines())
        self.assertIn("h2 = -p2*q2 + q1", self.r.parameter_lines())

    def test_corrupted_transform_fails(self):
        rows = [list(row) for row in self.r.transform.rows]
        rows[2][0] = rows[2][0] + 1
        broken = dataclasses.replace(self.r, transform=PolyMatrix(rows, 7))
        verification = verify_reparam(self.m, broken)
        self.assertFalse(verification.passed)
        self.assertEqual(verification.status, verdicts.FAILED)
        self.assertIn("row", verification.residual)

    def test_to_dict(self):
        data = self.r.to_dict()
        self.assertEqual(data["kind"], SISO_CANONICAL)
        self.assertEqual(data["verification"], {"status": verdicts.PASSED, "residual": ""})
        self.assertEqual([p["name"] for p in data["parameters"]], ["p0", "p1", "p2", "q0", "q1", "q2"])
        self.assertEqual([d["name"] for d in data["derived"]], ["h1", "h2", "h3"])


class CanonicalFormCases(SimpleTestCase):
    def test_catenary_two(self):
        m = model(2, [(1, 2), (2, 1)], [1], [1], [1])
        a12, a21, a01 = (m.variable(p) for p in m.params)
        r = siso_canonical_reparam(m)
        self.assertTrue(r.verification.passed)
        self.assertEqual(r.transform.rows[1], (-a21 - a01, a12))
        self.assertEqual(list(r.new_system.substitutions), [a01 * a12, a01 + a21 + a12, a12, MPoly.one(3)])

    def test_single_compartment(self):
        m = model(1, [], [1], [1], [1])
        r = siso_canonical_reparam(m)
        self.assertTrue(r.verification.passed)
        self.assertEqual(r.new_system.param_names, ("p0", "q0"))

    def test_not_siso(self):
        with self.assertRaises(NotSISO):
            siso_canonical_reparam(model(2, [(1, 2), (2, 1)], [1], [1, 2]))

    def test_not_observable(self):
        # compartment 2 never reaches the output
        with self.assertRaises(NotObservable):
            siso_canonical_reparam(model(2, [(1, 2)], [1], [1], [2]))

    def test_small_observable_models(self):
        specs = [
            FamilySpec(DIRECTED_CYCLE, 2, 3, input_sizes=(1,), output_sizes=(1,), leak_sizes=(0, 1)),
            FamilySpec(CATENARY, 1, 3, input_sizes=(1,), output_sizes=(1,), leak_sizes=(0, 1)),
            FamilySpec(MAMMILLARY, 3, 3, input_sizes=(1,), output_sizes=(1,), leak_sizes=(1,)),
        ]
        for spec in specs:
            for m in family_models(spec):
                try:
                    r = siso_canonical_reparam(m)
                except NotObservable:
                    continue
                with self.subTest(model=m.to_dict()):
                    self.assertTrue(r.verification.passed, r.verification.residual)


class ScalingQuotient(SimpleTestCase):
    def test_exchange(self):
        m = fixture_model("exchange")
        r = scaling_reparam(m)
        self.assertEqual(r.kind, SCALING_QUOTIENT)
        self.assertTrue(r.verification.passed, r.verification.residual)
        a12, a21, a01, a02 = (m.variable(p) for p in m.params)
        self.assertEqual(r.scaling, (MPoly.one(4), a12))
        self.assertEqual(list(r.new_system.substitutions), [a12 * a21, a01, a02])
        k1, k2, k3 = (MPoly.variable(t, 3) for t in range(3))
        self.assertEqual(r.new_system.matrix.rows, ((-k2, MPoly.one(3)), (k1, -k3)))
        self.assertEqual(r.state_definitions(), ["X1 = x1", "X2 = a12*x2"])

    def test_reparametrized_model_is_identifiable(self):
        r = scaling_reparam(fixture_model("exchange"))
        self.assertEqual(r.new_system.num_params, local_identifiability(fixture_model("exchange")).rank)

    def test_not_needed(self):
        result = scaling_reparam(fixture_model("cycle4"))
        self.assertIsInstance(result, NotApplicable)
        self.assertEqual(result.status, verdicts.NOT_NEEDED)

    def test_gap_is_reported(self):
        result = scaling_reparam(fixture_model("loop3"))
        self.assertIsInstance(result, NotApplicable)
        self.assertEqual(result.status, verdicts.NOT_APPLICABLE)
        self.assertEqual((result.symmetry_dim, result.kernel_dim, result.gap), (2, 3, 1))
        self.assertEqual(result.to_dict()["gap"], 1)

    def test_corrupted_scaling_fails(self):
        m = fixture_model("exchange")
        r = scaling_reparam(m)
        broken = dataclasses.replace(r, scaling=(MPoly.one(4), m.variable(m.param("a21"))))
        self.assertFalse(verify_reparam(m, broken).passed)
