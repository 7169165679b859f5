"""Export of classification databases (CSV and JSON lines)."""

import json
from collections.abc import Iterable
from pathlib import Path

from import_export import fields, resources, widgets  # type: ignore

from identifiability.models import ClassifiedModel

CSV_HEADER = (
    "model_hash",
    "n",
    "edges",
    "inputs",
    "outputs",
    "leaks",
    "rank",
    "kernel_dim",
    "verdict",
    "rule_hits",
    "agreement",
)


class BooleanFlagWidget(widgets.BooleanWidget):
    """Writes true/false, the way the JSON lines rows spell it."""

    def render(self, value, obj=None, **kwargs):
        if value is None:
            return ""
        return "true" if value else "false"


class ClassifiedModelResource(resources.ModelResource):
    n = fields.Field(attribute="n", column_name="n", widget=widgets.IntegerWidget(coerce_to_string=False))
    rank = fields.Field(attribute="rank", column_name="rank", widget=widgets.IntegerWidget(coerce_to_string=False))
    kernel_dim = fields.Field(
        attribute="kernel_dim",
        column_name="kernel_dim",
        widget=widgets.IntegerWidget(coerce_to_string=False),
    )
    agreement = fields.Field(attribute="agreement", column_name="agreement", widget=BooleanFlagWidget())

    class Meta:
        model = ClassifiedModel
        fields = CSV_HEADER
        export_order = CSV_HEADER


def export_rows(rows: Iterable[ClassifiedModel], path: Path, summary: dict[str, int] | None = None) -> None:
    """Write rows as CSV, or as JSON lines when the suffix is .jsonl.

    A JSON lines file ends with one summary object.
    """
    dataset = ClassifiedModelResource().export(list(rows))
    if path.suffix == ".jsonl":
        with path.open("w") as f:
            for record in dataset.dict:
                item = dict(record)
                item["agreement"] = item["agreement"] == "true"
                f.write(json.dumps(item, sort_keys=True) + "\n")
            if summary is not None:
                f.write(json.dumps({"summary": summary}, sort_keys=True) + "\n")
    else:
        with path.open("w", newline="") as f:
            f.write(dataset.csv)
