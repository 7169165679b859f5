from identifiability import reports
from identifiability.engine import local_identifiability, sample_for, scaling_symmetries
from identifiability.management.analysis import AnalysisCommand


class Command(AnalysisCommand):
    help = """Generic local identifiability of a model: rank of the coefficient
    map, per-parameter verdicts and the dimension of its scaling symmetries."""

    def add_command_arguments(self, parser):
        parser.add_argument(
            "--params",
            nargs="+",
            metavar="NAME",
            help="only report these parameters (e.g. a21 a01)",
        )

    def analyse(self, model, options):
        seed, trials = options["seed"], options["trials"]
        params = options.get("params") or None
        if params:
            for name in params:
                model.param(name)
        sample = sample_for(model, trials, seed)
        report = local_identifiability(model, sample=sample, seed=seed)
        symmetry = scaling_symmetries(model, sample=sample)
        data = reports.analyze_data(model, report, symmetry, seed, trials, params)
        return data, reports.analyze_lines(data)
