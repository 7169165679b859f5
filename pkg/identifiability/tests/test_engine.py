import random
from fractions import Fraction

from django.test import SimpleTestCase

from identifiability import verdicts
from identifiability.compartments import CompModel
from identifiability.engine import (
    Confidence,
    JacobianSample,
    confidence_for,
    function_identifiability,
    generic_rank,
    local_identifiability,
    monomial_weight,
    parameter_identifiability,
    rank_of_polys,
    sample_for,
    scaling_symmetries,
)
from identifiability.exceptions import DenominatorVanishes, UnknownParameter
from identifiability.expressions import parse_expression
from identifiability.io_equations import io_coefficient_map
from identifiability.linalg import exact_rank
from identifiability.polyring import PRIME, JacobianEvaluator, MPoly
from identifiability.tests import fixture_model, random_digraph_model


class Rank(SimpleTestCase):
    def test_cycle4_is_identifiable(self):
        report = local_identifiability(fixture_model("cycle4"))
        self.assertEqual(report.num_params, 6)
        self.assertEqual(report.rank, 6)
        self.assertEqual(report.kernel_dim, 0)
        self.assertTrue(report.identifiable)
        self.assertEqual(set(report.per_param.values()), {verdicts.LOCALLY_IDENTIFIABLE})

    def test_loop3(self):
        m = fixture_model("loop3")
        report = local_identifiability(m)
        self.assertEqual((report.rank, report.num_params, report.kernel_dim), (4, 7, 3))
        self.assertEqual(report.model_verdict, verdicts.UNIDENTIFIABLE)
        self.assertEqual(report.per_param["a01"], verdicts.LOCALLY_IDENTIFIABLE)
        for name in ("a13", "a21", "a23", "a32", "a02", "a03"):
            self.assertEqual(report.per_param[name], verdicts.UNIDENTIFIABLE, name)

    def test_parameter_by_name(self):
        m = fixture_model("loop3")
        self.assertEqual(parameter_identifiability(m, "a01"), verdicts.LOCALLY_IDENTIFIABLE)
        with self.assertRaises(UnknownParameter):
            parameter_identifiability(m, "a99")

    def test_modular_rank_matches_exact_rank(self):
        rng = random.Random(8)
        for name in ("cycle4", "loop3", "exchange"):
            m = fixture_model(name)
            cmap = io_coefficient_map(m)
            evaluator = JacobianEvaluator(cmap.nonconstant(), m.num_params)
            values = [rng.randint(2, 50) for _ in range(m.num_params)]
            with self.subTest(model=name):
                self.assertEqual(exact_rank(evaluator.exact_at(values)), generic_rank(cmap).rank)

    def test_deterministic_for_a_seed(self):
        m = fixture_model("loop3")
        first = local_identifiability(m, trials=4, seed=12)
        second = local_identifiability(m, trials=4, seed=12)
        self.assertEqual(first, second)
        self.assertEqual(sample_for(m, 2, 5).points, sample_for(m, 2, 5).points)

    def test_confidence(self):
        confidence = local_identifiability(fixture_model("loop3")).confidence
        self.assertEqual(confidence.per_trial_bound, Fraction(3 * 7, PRIME))
        self.assertEqual(confidence.failure_bound, Fraction(21, PRIME) ** 3)
        self.assertIn("21/2305843009213693951", confidence.line())

    def test_confidence_without_sampling(self):
        m = fixture_model("loop3")
        self.assertEqual(confidence_for(m), local_identifiability(m).confidence)
        self.assertEqual(confidence_for(m, trials=5).trials, 5)

    def test_weakest_confidence(self):
        small = confidence_for(fixture_model("exchange"))
        large = confidence_for(fixture_model("cycle4"))
        self.assertEqual(Confidence.worst([small, large], 3), max(small, large, key=lambda c: c.per_trial_bound))
        self.assertEqual(Confidence.worst([], 3).failure_bound, 0)

    def test_verdict_follows_kernel(self):
        for name in ("cycle4", "loop3", "exchange"):
            report = local_identifiability(fixture_model(name))
            with self.subTest(model=name):
                self.assertEqual(report.model_verdict, verdicts.from_rank(report.kernel_dim))

    def test_rank_grows_with_outputs(self):
        rng = random.Random(19)
        for trial in range(30):
            m = random_digraph_model(rng, rng.randint(2, 4))
            extra = [c for c in range(m.n) if c not in m.outputs]
            if not extra:
                continue
            wider = m.with_sets(outputs=sorted({*m.outputs, rng.choice(extra)}))
            with self.subTest(trial=trial, model=m.to_dict()):
                self.assertGreaterEqual(sample_for(wider).rank, sample_for(m).rank)

    def test_model_without_parameters(self):
        single = CompModel(n=1, edges=(), inputs=(0,), outputs=(0,))
        report = local_identifiability(single)
        self.assertEqual((report.rank, report.num_params, report.kernel_dim), (0, 0, 0))
        self.assertTrue(report.identifiable)

    def test_rank_of_polys(self):
        x, y = MPoly.variable(0, 2), MPoly.variable(1, 2)
        self.assertEqual(rank_of_polys([x * y, x * x * y * y, MPoly.one(2)], 2), 1)
        self.assertEqual(rank_of_polys([x + y, x * y], 2), 2)


class Functions(SimpleTestCase):
    def setUp(self):
        self.m = fixture_model("loop3")
        self.sample = sample_for(self.m)

    def verdict(self, text):
        f = parse_expression(text, self.m.param_names)
        return function_identifiability(self.m, f, sample=self.sample)

    def test_identifiable_combinations(self):
        for text in ("a01", "a02+a03", "a13*a32*a21", "a02*a03-a23*a32"):
            with self.subTest(expression=text):
                self.assertEqual(self.verdict(text), verdicts.LOCALLY_IDENTIFIABLE)

    def test_unidentifiable(self):
        for text in ("a02", "a23*a32", "a13"):
            with self.subTest(expression=text):
                self.assertEqual(self.verdict(text), verdicts.UNIDENTIFIABLE)

    def test_rational_functions(self):
        self.assertEqual(self.verdict("(a02+a03)/a01"), verdicts.LOCALLY_IDENTIFIABLE)
        self.assertEqual(self.verdict("a02/a03"), verdicts.UNIDENTIFIABLE)

    def test_constants_are_identifiable(self):
        self.assertEqual(self.verdict("7"), verdicts.LOCALLY_IDENTIFIABLE)

    def test_vanishing_denominator(self):
        zero_den = parse_expression("a01", self.m.param_names)
        broken = type(zero_den)(zero_den.numerator, MPoly.zero(self.m.num_params), "broken")
        with self.assertRaises(DenominatorVanishes):
            function_identifiability(self.m, broken, sample=self.sample, retries=2)

    def test_sample_extends_on_demand(self):
        sample = JacobianSample(io_coefficient_map(self.m), trials=2, seed=3)
        index = sample.extra_point()
        self.assertEqual(index, 2)
        self.assertEqual(len(sample.points), 3)


class Scaling(SimpleTestCase):
    def test_loop3_leaves_a_gap(self):
        symmetry = scaling_symmetries(fixture_model("loop3"))
        self.assertEqual(symmetry.dim, 2)
        self.assertEqual(symmetry.kernel_dim, 3)
        self.assertEqual(symmetry.gap, 1)
        self.assertFalse(symmetry.complete)
        self.assertEqual(symmetry.free_compartments, (1, 2))

    def test_exchange_is_explained(self):
        m = fixture_model("exchange")
        symmetry = scaling_symmetries(m)
        self.assertEqual((symmetry.dim, symmetry.kernel_dim), (1, 1))
        self.assertTrue(symmetry.complete)
        self.assertEqual(symmetry.basis[0][0], 0)
        a12, a21 = m.variable(m.param("a12")), m.variable(m.param("a21"))
        self.assertIn(a12 * a21, symmetry.invariant_monomials())

    def test_invariants_have_weight_zero(self):
        m = fixture_model("loop3")
        symmetry = scaling_symmetries(m)
        for v in symmetry.basis:
            for exps in symmetry.invariants_basis:
                self.assertEqual(monomial_weight(m, exps, v), 0)

    def test_identifiable_model_has_no_symmetry(self):
        symmetry = scaling_symmetries(fixture_model("cycle4"))
        self.assertEqual((symmetry.dim, symmetry.kernel_dim), (0, 0))
        self.assertTrue(symmetry.complete)
