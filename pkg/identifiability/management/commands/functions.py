from pathlib import Path

from django.conf import settings
from django.core.management.base import CommandError

from identifiability import reports
from identifiability.criteria import cycle_path_monomials
from identifiability.engine import function_identifiability, sample_for
from identifiability.exceptions import ModelFileError
from identifiability.expressions import parse_expression
from identifiability.management.analysis import INPUT_ERROR, AnalysisCommand


def read_expressions(path):
    """One expression per line; blank lines and # comments are skipped."""
    try:
        text = Path(path).read_text()
    except OSError as e:
        msg = f"{path}: cannot read expression file ({e.strerror})"
        raise ModelFileError(msg) from None
    expressions = []
    for line in text.splitlines():
        expression = line.split("#", 1)[0].strip()
        if expression:
            expressions.append(expression)
    return expressions


class Command(AnalysisCommand):
    help = """Decide local identifiability of rational functions of the parameters."""

    def add_command_arguments(self, parser):
        parser.add_argument(
            "--expr",
            action="append",
            default=[],
            metavar="EXPRESSION",
            help='an expression such as "a02+a03" or "a21*a12/a01" (repeatable)',
        )
        parser.add_argument("--file", help="file with one expression per line")
        parser.add_argument(
            "--auto",
            action="store_true",
            help="also test every cycle monomial and input-to-output path monomial",
        )
        parser.add_argument(
            "--cap",
            type=int,
            default=settings.COMPID_CYCLE_CAP,
            help="stop listing cycles and paths after this many",
        )

    def analyse(self, model, options):
        seed, trials = options["seed"], options["trials"]
        texts = list(options["expr"])
        if options.get("file"):
            texts.extend(read_expressions(options["file"]))
        if not texts and not options["auto"]:
            msg = "nothing to check: give --expr, --file or --auto"
            raise CommandError(msg, returncode=INPUT_ERROR)
        functions = [parse_expression(text, model.param_names) for text in texts]
        sample = sample_for(model, trials, seed)
        results = [
            (
                f.text,
                function_identifiability(
                    model, f, sample=sample, retries=settings.COMPID_DENOMINATOR_RETRIES
                ),
            )
            for f in functions
        ]
        monomials = None
        if options["auto"]:
            monomials = cycle_path_monomials(model, cap=options["cap"], sample=sample)
        data = reports.functions_data(
            model, results, seed, trials, sample.confidence(), monomials
        )
        return data, reports.functions_lines(data)
