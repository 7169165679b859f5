from django.db import models

from identifiability import verdicts
from identifiability.families import FamilyRow

VERDICT_CHOICES = [
    (verdicts.LOCALLY_IDENTIFIABLE, verdicts.get_display(verdicts.LOCALLY_IDENTIFIABLE)),
    (verdicts.UNIDENTIFIABLE, verdicts.get_display(verdicts.UNIDENTIFIABLE)),
]


class EnumerationRun(models.Model):
    """One `enumerate` invocation; its rows are the ClassifiedModels."""

    family = models.CharField(max_length=32)
    n_min = models.PositiveSmallIntegerField()
    n_max = models.PositiveSmallIntegerField()
    seed = models.BigIntegerField(default=0)
    trials = models.PositiveSmallIntegerField(default=3)
    created = models.DateTimeField(auto_now_add=True)

    models_count = models.PositiveIntegerField(default=0)
    identifiable_count = models.PositiveIntegerField(default=0)
    unidentifiable_count = models.PositiveIntegerField(default=0)
    rule_covered_count = models.PositiveIntegerField(default=0)
    disagreement_count = models.PositiveIntegerField(default=0)

    class Meta:
        ordering = ("-created",)

    def __str__(self):
        return f"{self.family} n={self.n_min}..{self.n_max} seed={self.seed}"

    def record_summary(self, summary: dict[str, int]) -> None:
        self.models_count = summary["models"]
        self.identifiable_count = summary["identifiable"]
        self.unidentifiable_count = summary["unidentifiable"]
        self.rule_covered_count = summary["rule_covered"]
        self.disagreement_count = summary["disagreements"]
        self.save()


class ClassifiedModel(models.Model):
    """A model with its rank verdict, graph rule hits and their agreement.

    The columns are those of the CSV database files.
    """

    run = models.ForeignKey(
        EnumerationRun,
        null=True,
        blank=True,
        on_delete=models.CASCADE,
        related_name="rows",
    )
    sequence = models.PositiveIntegerField(default=0)
    model_hash = models.CharField(max_length=16, db_index=True)
    n = models.PositiveSmallIntegerField()
    edges = models.TextField(blank=True)
    inputs = models.CharField(max_length=64)
    outputs = models.CharField(max_length=64)
    leaks = models.CharField(max_length=64, blank=True)
    rank = models.PositiveIntegerField()
    kernel_dim = models.PositiveIntegerField()
    verdict = models.CharField(max_length=32, choices=VERDICT_CHOICES)
    rule_hits = models.TextField(blank=True)
    agreement = models.BooleanField()

    class Meta:
        ordering = ("run", "sequence")
        constraints = (
            models.UniqueConstraint(fields=("run", "sequence"), name="unique_row_per_run"),
        )

    def __str__(self):
        return f"{self.model_hash} ({self.verdict})"

    @classmethod
    def from_row(cls, row: FamilyRow, run: EnumerationRun | None = None) -> "ClassifiedModel":
        return cls(run=run, sequence=row.sequence, **row.to_dict())
