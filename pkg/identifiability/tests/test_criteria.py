import itertools
import random

from django.test import SimpleTestCase

from identifiability import criteria, verdicts
from identifiability.compartments import CompModel, graph_props, relabel, relabel_param, validate_model
from identifiability.engine import local_identifiability, parameter_identifiability, sample_for
from identifiability.exceptions import EnumerationCapExceeded
from identifiability.families import (
    ALL_DIGRAPHS,
    BIDIRECTED_TREE,
    CATENARY,
    DIRECTED_CYCLE,
    DIRECTED_PATH,
    MAMMILLARY,
    FamilySpec,
    family_models,
)
from identifiability.tests import (
    EXHAUSTIVE,
    block_chain_edges,
    build,
    fixture_model,
    random_digraph_model,
    strongly_connected_edges,
)


def cycle(n, inputs, outputs, leaks):
    return validate_model(
        {
            "compartments": n,
            "edges": [[k, k % n + 1] for k in range(1, n + 1)],
            "inputs": inputs,
            "outputs": outputs,
            "leaks": leaks,
        }
    )


def rule_ids(m):
    return [hit.rule_id for hit in criteria.classify(m)]


class Interlacing(SimpleTestCase):
    def test_cycle4(self):
        m = fixture_model("cycle4")
        self.assertTrue(criteria.leaks_interlace(m))
        self.assertIn(criteria.CYCLE_INTERLACING, rule_ids(m))

    def test_two_leaks_between_marks(self):
        # leaks at 2 and 3 with nothing marked between them
        m = cycle(3, [1], [1], [2, 3])
        self.assertFalse(criteria.leaks_interlace(m))
        self.assertIn(criteria.CYCLE_NON_INTERLACING, rule_ids(m))

    def test_input_right_after_output(self):
        self.assertTrue(criteria.leaks_interlace(cycle(4, [3], [2], [1])))
        self.assertFalse(criteria.leaks_interlace(cycle(4, [3], [2], [1, 3])))

    def test_at_most_one_leak_always_interlaces(self):
        for leaks in ([], [1], [2], [3]):
            self.assertTrue(criteria.leaks_interlace(cycle(3, [1], [2], leaks)))

    def test_only_for_cycles(self):
        with self.assertRaises(ValueError):
            criteria.leaks_interlace(fixture_model("loop3"))

    def test_agrees_with_rank_on_small_cycles(self):
        n_max = 6 if EXHAUSTIVE else 4
        for m in family_models(FamilySpec(DIRECTED_CYCLE, 2, n_max)):
            report = local_identifiability(m)
            expected = report.kernel_dim == 0
            with self.subTest(model=m.to_dict()):
                self.assertEqual(criteria.leaks_interlace(m), expected)


class Trees(SimpleTestCase):
    def test_rules_agree_with_rank(self):
        n_max = 5 if EXHAUSTIVE else 4
        spec = FamilySpec(BIDIRECTED_TREE, 1, n_max, input_sizes=(1,), output_sizes=(1,), leak_sizes=(0, 1, 2))
        for m in family_models(spec):
            hits = criteria.classify(m)
            report = local_identifiability(m)
            with self.subTest(model=m.to_dict()):
                self.assertIsNotNone(criteria.model_rule_verdict(hits))
                self.assertTrue(criteria.agreement(hits, report))

    def test_far_output(self):
        m = validate_model(
            {"compartments": 3, "edges": [[1, 2], [2, 1], [2, 3], [3, 2]], "inputs": [1], "outputs": [3], "leaks": []}
        )
        self.assertEqual(rule_ids(m), [criteria.TREE_FAR_OUTPUT])
        self.assertEqual(criteria.model_rule_verdict(criteria.classify(m)), verdicts.UNIDENTIFIABLE)


class AllDigraphs(SimpleTestCase):
    def test_rules_never_contradict_rank(self):
        n_max = 3 if EXHAUSTIVE else 2
        for m in family_models(FamilySpec(ALL_DIGRAPHS, 1, n_max)):
            hits = criteria.classify(m)
            if not hits:
                continue
            with self.subTest(model=m.to_dict()):
                self.assertTrue(criteria.agreement(hits, local_identifiability(m)))


class RandomFamilies(SimpleTestCase):
    """Every rule that fires agrees with the rank engine."""

    families = (CATENARY, MAMMILLARY, DIRECTED_PATH, DIRECTED_CYCLE)

    def test_random_members(self):
        rng = random.Random(17)
        checked = 0
        for family in self.families:
            models = list(family_models(FamilySpec(family, 2, 4)))
            for m in rng.sample(models, min(25, len(models))):
                hits = criteria.classify(m)
                if not hits:
                    continue
                checked += 1
                with self.subTest(family=family, model=m.to_dict()):
                    self.assertTrue(criteria.agreement(hits, local_identifiability(m)))
        self.assertGreater(checked, 0)

    def test_directed_path_with_endpoint_leaks(self):
        m = validate_model(
            {"compartments": 3, "edges": [[1, 2], [2, 3]], "inputs": [1], "outputs": [3], "leaks": [1, 3]}
        )
        self.assertIn(criteria.PATH_ENDPOINT_LEAKS, rule_ids(m))
        self.assertTrue(local_identifiability(m).identifiable)

    def test_catenary_parameters(self):
        m = validate_model(
            {"compartments": 3, "edges": [[1, 2], [2, 1], [2, 3], [3, 2]], "inputs": [1], "outputs": [1], "leaks": [3]}
        )
        hit = next(h for h in criteria.classify(m) if h.rule_id == criteria.CATENARY_ALL)
        self.assertEqual(hit.affected_params, m.param_names)
        self.assertEqual(hit.citation, "global-parameters/catenary")

    def test_unreachable_parameters(self):
        m = validate_model({"compartments": 2, "edges": [[1, 2]], "inputs": [1], "outputs": [1], "leaks": [2]})
        self.assertEqual(criteria.unidentifiable_params_by_reachability(m), {m.param("a02")})
        hit = next(h for h in criteria.classify(m) if h.rule_id == criteria.UNREACHABLE)
        self.assertEqual(hit.affected_params, ("a02",))
        report = local_identifiability(m)
        self.assertTrue(criteria.agreement([hit], report))

    def test_conflicting_hits_are_reported(self):
        m = fixture_model("cycle4")
        report = local_identifiability(m)
        wrong = criteria.RuleHit(
            criteria.CYCLE_NON_INTERLACING,
            verdicts.MODEL_UNIDENTIFIABLE,
            (),
            "unidentifiable-models/directed-cycle-non-interlacing",
        )
        self.assertFalse(criteria.agreement([wrong], report))


class LeakBounds(SimpleTestCase):
    """More leaks than marked compartments leaves a model unidentifiable."""

    count = 200 if EXHAUSTIVE else 30
    n_max = 6 if EXHAUSTIVE else 5

    def test_strongly_connected_with_one_input(self):
        rng = random.Random(31)
        for trial in range(self.count):
            n = rng.randint(3, self.n_max)
            source = rng.randint(1, n)
            outputs = rng.sample(range(1, n + 1), rng.randint(1, 2))
            if len({source, *outputs}) >= n:
                outputs = [source]
            marked = len({source, *outputs})
            leaks = rng.sample(range(1, n + 1), rng.randint(marked + 1, n))
            m = build(n, strongly_connected_edges(rng, n), [source], outputs, leaks)
            with self.subTest(trial=trial, model=m.to_dict()):
                self.assertIn(criteria.STRONGLY_CONNECTED_LEAKS, rule_ids(m))
                self.assertGreater(local_identifiability(m).kernel_dim, 0)

    def test_io_connected_with_one_output(self):
        rng = random.Random(32)
        for trial in range(self.count):
            n = rng.randint(3, self.n_max)
            order = list(range(1, n + 1))
            rng.shuffle(order)
            cuts = sorted(rng.sample(range(1, n), rng.randint(1, min(2, n - 1))))
            blocks = [order[a:b] for a, b in zip([0, *cuts], [*cuts, n])]
            source, sink = rng.choice(blocks[0]), rng.choice(blocks[-1])
            marked = len({source, sink})
            leaks = rng.sample(range(1, n + 1), rng.randint(marked + 1, n))
            m = build(n, block_chain_edges(rng, blocks), [source], [sink], leaks)
            with self.subTest(trial=trial, model=m.to_dict()):
                self.assertTrue(graph_props(m).strongly_io_connected)
                self.assertIn(criteria.IO_CONNECTED_LEAKS, rule_ids(m))
                self.assertGreater(local_identifiability(m).kernel_dim, 0)


class Reachability(SimpleTestCase):
    def test_flagged_parameters_are_unidentifiable(self):
        rng = random.Random(33)
        flagged_total = 0
        for trial in range(200 if EXHAUSTIVE else 40):
            m = random_digraph_model(rng, rng.randint(2, 4))
            flagged = criteria.unidentifiable_params_by_reachability(m)
            flagged_total += len(flagged)
            for p in flagged:
                with self.subTest(trial=trial, model=m.to_dict(), parameter=p.name):
                    self.assertEqual(parameter_identifiability(m, p.name), verdicts.UNIDENTIFIABLE)
        self.assertGreater(flagged_total, 0)


class GlobalParameters(SimpleTestCase):
    def test_catenary_with_input_and_output_at_an_end(self):
        for n in range(1, 7):
            edges = [(k, k + 1) for k in range(1, n)] + [(k + 1, k) for k in range(1, n)]
            for leaks in [[], *([c] for c in range(1, n + 1))]:
                m = build(n, edges, [1], [1], leaks)
                with self.subTest(model=m.to_dict()):
                    self.assertEqual(local_identifiability(m).kernel_dim, 0)
                    if n > 1:
                        self.assertIn(criteria.CATENARY_ALL, rule_ids(m))

    def test_edge_from_input_to_output(self):
        rng = random.Random(34)
        for trial in range(100 if EXHAUSTIVE else 25):
            n = rng.randint(2, 6 if EXHAUSTIVE else 5)
            source, sink = rng.sample(range(1, n + 1), 2)
            edges = strongly_connected_edges(rng, n) | {(source, sink)}
            leaks = [c for c in range(1, n + 1) if rng.random() < 0.4]
            m = build(n, edges, [source], [sink], leaks)
            name = m.edge_param(source - 1, sink - 1).name
            hit = next(h for h in criteria.classify(m) if h.rule_id == criteria.INPUT_OUTPUT_EDGE)
            with self.subTest(trial=trial, model=m.to_dict()):
                self.assertEqual(hit.affected_params, (name,))
                self.assertEqual(local_identifiability(m).per_param[name], verdicts.LOCALLY_IDENTIFIABLE)


class Relabelling(SimpleTestCase):
    def test_rules_are_equivariant(self):
        rng = random.Random(2)
        models = list(family_models(FamilySpec(CATENARY, 3, 3)))
        models += list(family_models(FamilySpec(DIRECTED_CYCLE, 3, 3)))
        for m in rng.sample(models, 30):
            permutation = list(range(m.n))
            rng.shuffle(permutation)
            moved = relabel(m, permutation)
            before = criteria.classify(m)
            after = criteria.classify(moved)
            with self.subTest(model=m.to_dict(), permutation=permutation):
                self.assertEqual(sorted(h.rule_id for h in before), sorted(h.rule_id for h in after))
                for hit in before:
                    renamed = sorted(relabel_param(m, m.param(name), permutation) for name in hit.affected_params)
                    self.assertTrue(
                        any(h.rule_id == hit.rule_id and sorted(h.affected_params) == renamed for h in after)
                    )


class Monomials(SimpleTestCase):
    def setUp(self):
        self.m = fixture_model("loop3")
        self.sample = sample_for(self.m)

    def test_cycles(self):
        report = criteria.cycle_path_monomials(self.m, sample=self.sample)
        self.assertFalse(report.truncated)
        found = {c.support: verdict for c, verdict in report.candidates}
        # 2 <-> 3 and 1 -> 2 -> 3 -> 1
        self.assertEqual(set(found), {(1, 2), (0, 1, 2)})
        self.assertEqual(found[(1, 2)], verdicts.UNIDENTIFIABLE)
        self.assertEqual(found[(0, 1, 2)], verdicts.LOCALLY_IDENTIFIABLE)
        self.assertTrue(all(c.kind == criteria.CYCLE for c, _ in report.candidates))

    def test_io_paths(self):
        m = fixture_model("cycle4")
        report = criteria.cycle_path_monomials(m)
        paths = [c for c, _ in report.candidates if c.kind == criteria.IO_PATH]
        self.assertEqual([c.support for c in paths], [(0, 1)])
        self.assertEqual(paths[0].monomial, m.variable(m.param("a21")))

    def test_cap(self):
        with self.assertLogs("identifiability.criteria", "WARNING"):
            report = criteria.cycle_path_monomials(self.m, cap=1, sample=self.sample)
        self.assertTrue(report.truncated)
        self.assertEqual(len(report.candidates), 1)
        with self.assertRaises(EnumerationCapExceeded):
            criteria.cycle_path_monomials(self.m, cap=1, sample=self.sample, strict=True)


class Properties(SimpleTestCase):
    def test_no_rule_on_generic_graph(self):
        m = CompModel(n=3, edges=((0, 1), (1, 2), (0, 2)), inputs=(0,), outputs=(2,))
        props = graph_props(m)
        self.assertFalse(props.is_directed_cycle or props.is_bidirected_tree or props.is_directed_path)
        self.assertEqual(rule_ids(m), [])

    def test_hits_come_in_report_order(self):
        order = list(criteria.RULES)
        for m in itertools.islice(family_models(FamilySpec(CATENARY, 1, 3)), 40):
            ids = rule_ids(m)
            self.assertEqual(ids, sorted(ids, key=order.index))
