from django.conf import settings

from identifiability import reports
from identifiability.engine import confidence_for
from identifiability.management.analysis import AnalysisCommand
from identifiability.search import minimal_output_additions, minimal_parameter_fixings

OUTPUTS = "outputs"
FIX = "fix"


class Command(AnalysisCommand):
    help = """Find the smallest sets of added outputs or fixed parameters that
    make a model locally identifiable."""

    def add_command_arguments(self, parser):
        parser.add_argument("--what", choices=(OUTPUTS, FIX), default=OUTPUTS)
        parser.add_argument(
            "--max-size",
            type=int,
            default=settings.COMPID_SEARCH_BUDGET,
            help="largest set size searched",
        )
        parser.add_argument(
            "--inputs",
            action="store_true",
            help="with --what outputs, also consider adding inputs",
        )

    def analyse(self, model, options):
        seed, trials = options["seed"], options["trials"]
        budget = options["max_size"]
        if options["what"] == OUTPUTS:
            result = minimal_output_additions(
                model, budget, include_inputs=options["inputs"], trials=trials, seed=seed
            )
        else:
            result = minimal_parameter_fixings(model, budget, trials=trials, seed=seed)
        data = reports.suggest_data(model, result, seed, trials, confidence_for(model, trials))
        return data, reports.suggest_lines(data)
