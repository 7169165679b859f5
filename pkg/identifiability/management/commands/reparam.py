from identifiability import reports
from identifiability.engine import confidence_for
from identifiability.management.analysis import AnalysisCommand
from identifiability.reparam import scaling_reparam, siso_canonical_reparam

SISO = "siso"
SCALING = "scaling"


class Command(AnalysisCommand):
    help = """Construct and verify an identifiable reparametrization."""

    def add_command_arguments(self, parser):
        parser.add_argument(
            "--mode",
            choices=(SISO, SCALING),
            default=SISO,
            help="siso: observability canonical form; scaling: quotient by scaling symmetries",
        )

    def analyse(self, model, options):
        seed, trials = options["seed"], options["trials"]
        if options["mode"] == SISO:
            result = siso_canonical_reparam(model, seed)
        else:
            result = scaling_reparam(model, trials, seed)
        data = reports.reparam_data(model, result, seed, trials, confidence_for(model, trials))
        return data, reports.reparam_lines(data)
