from identifiability import reports
from identifiability.criteria import agreement, classify
from identifiability.engine import confidence_for, local_identifiability
from identifiability.management.analysis import AnalysisCommand


class Command(AnalysisCommand):
    help = """Apply the graph-theoretic identifiability rules to a model."""

    def add_command_arguments(self, parser):
        parser.add_argument(
            "--check",
            action="store_true",
            help="also run the rank engine and report whether it agrees",
        )

    def analyse(self, model, options):
        seed, trials = options["seed"], options["trials"]
        hits = classify(model)
        report = None
        agrees = None
        if options["check"]:
            report = local_identifiability(model, trials, seed)
            agrees = agreement(hits, report)
        confidence = report.confidence if report else confidence_for(model, trials)
        data = reports.classify_data(model, hits, seed, trials, confidence, report, agrees)
        return data, reports.classify_lines(data)
