import logging
from pathlib import Path

from django.conf import settings
from django.core.management.base import CommandError
from django.db import transaction

from identifiability import reports
from identifiability.compartments import LeakConvention
from identifiability.engine import Confidence
from identifiability.families import FAMILIES, FamilySpec, enumerate_family, summarize
from identifiability.management.analysis import INPUT_ERROR, AnalysisCommand
from identifiability.models import ClassifiedModel, EnumerationRun
from identifiability.resources import export_rows

logger = logging.getLogger(__name__)

PROGRESS_EVERY = 1000


def parse_range(text):
    """'3' or '3..6'."""
    low, _, high = text.partition("..")
    try:
        return int(low), int(high or low)
    except ValueError:
        msg = f"--n expects N or A..B, got {text!r}"
        raise CommandError(msg, returncode=INPUT_ERROR) from None


def parse_sizes(text):
    if text is None:
        return None
    try:
        return tuple(sorted({int(part) for part in text.split(",")}))
    except ValueError:
        msg = f"set sizes are comma-separated integers, got {text!r}"
        raise CommandError(msg, returncode=INPUT_ERROR) from None


class Command(AnalysisCommand):
    help = """Enumerate a model family and write a classification database
    (CSV, or JSON lines when the output ends in .jsonl)."""

    takes_model = False

    def add_command_arguments(self, parser):
        parser.add_argument("--family", choices=FAMILIES, required=True)
        parser.add_argument("--n", required=True, help="compartment count N or range A..B")
        parser.add_argument("--out", required=True, help="database file (.csv or .jsonl)")
        parser.add_argument("--inputs", help="allowed input set sizes, e.g. 1 or 1,2")
        parser.add_argument("--outputs", help="allowed output set sizes")
        parser.add_argument("--leaks", help="allowed leak set sizes, e.g. 0,1,2")
        parser.add_argument(
            "--no-dedup",
            action="store_true",
            help="keep models that differ only by a symmetry of their graph",
        )
        parser.add_argument(
            "--leak-convention",
            choices=[c.value for c in LeakConvention],
            default=LeakConvention.ENVIRONMENT.value,
        )
        parser.add_argument(
            "--workers",
            type=int,
            default=settings.COMPID_WORKERS,
            help="worker processes",
        )
        parser.add_argument("--store", action="store_true", help="also save the rows to the database")

    def analyse(self, model, options):
        seed, trials = options["seed"], options["trials"]
        n_min, n_max = parse_range(options["n"])
        spec = FamilySpec(
            family=options["family"],
            n_min=n_min,
            n_max=n_max,
            input_sizes=parse_sizes(options["inputs"]),
            output_sizes=parse_sizes(options["outputs"]),
            leak_sizes=parse_sizes(options["leaks"]),
            dedup=not options["no_dedup"],
            leak_convention=LeakConvention(options["leak_convention"]),
        )
        try:
            spec.check()
        except ValueError as e:
            raise CommandError(str(e), returncode=INPUT_ERROR) from None

        rows = []
        for row in enumerate_family(spec, trials, seed, workers=options["workers"]):
            rows.append(row)
            if not row.agreement:
                logger.warning("graph rules and rank disagree on %s", row.model.model_hash)
            if len(rows) % PROGRESS_EVERY == 0:
                logger.info("%s: %d models classified", spec.family, len(rows))
        summary = summarize(rows)
        logger.info("%s n=%d..%d: %s", spec.family, n_min, n_max, summary)

        if options["store"]:
            with transaction.atomic():
                run = EnumerationRun.objects.create(
                    family=spec.family, n_min=n_min, n_max=n_max, seed=seed, trials=trials
                )
                records = ClassifiedModel.objects.bulk_create(
                    ClassifiedModel.from_row(row, run) for row in rows
                )
                run.record_summary(summary)
        else:
            records = [ClassifiedModel.from_row(row) for row in rows]

        path = Path(options["out"])
        export_rows(records, path, summary)
        confidence = Confidence.worst((row.confidence for row in rows), trials)
        data = {
            **reports.header(seed, trials, confidence),
            "command": "enumerate",
            "family": spec.family,
            "n": [n_min, n_max],
            "out": str(path),
            "summary": summary,
        }
        return data, reports.enumerate_lines(spec.family, n_min, n_max, str(path), summary)
