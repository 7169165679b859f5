import logging
from typing import Any

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from identifiability.compartments import CompModel
from identifiability.exceptions import ModelValidationError, PreconditionError
from identifiability.modelfile import parse_model_file
from identifiability.reports import render_json, render_text

INPUT_ERROR = 1
PRECONDITION_FAILED = 2

LEVELS = {
    0: logging.ERROR,
    1: logging.WARNING,
    2: logging.INFO,
    3: logging.DEBUG,
}


class AnalysisCommand(BaseCommand):
    """Shared plumbing for the analysis commands.

    Subclasses implement ``analyse`` and return the JSON report together with
    its text rendering. Input errors exit with status 1, failed analysis
    preconditions with status 2; a verdict is never an error.
    """

    takes_model = True

    def add_arguments(self, parser):
        if self.takes_model:
            parser.add_argument("model", help="model file (YAML or JSON)")
        parser.add_argument(
            "--seed",
            type=int,
            default=settings.COMPID_SEED,
            help="seed of the random evaluation points",
        )
        parser.add_argument(
            "--trials",
            type=int,
            default=settings.COMPID_TRIALS,
            help="number of random evaluation points",
        )
        parser.add_argument("--json", action="store_true", help="print the JSON report")
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def analyse(
        self, model: CompModel | None, options: dict[str, Any]
    ) -> tuple[dict[str, Any], list[str]]:
        raise NotImplementedError

    def handle(self, *args, **options):
        logging.getLogger("identifiability").setLevel(
            LEVELS.get(options.get("verbosity", 1), logging.DEBUG)
        )
        if options["trials"] < 1:
            msg = f"--trials must be at least 1, got {options['trials']}"
            raise CommandError(msg, returncode=INPUT_ERROR)
        try:
            model = parse_model_file(options["model"]) if self.takes_model else None
            data, lines = self.analyse(model, options)
        except ModelValidationError as e:
            raise CommandError(str(e), returncode=INPUT_ERROR) from None
        except PreconditionError as e:
            raise CommandError(str(e), returncode=PRECONDITION_FAILED) from None
        output = render_json(data) if options["json"] else render_text(lines)
        self.stdout.write(output, ending="")
