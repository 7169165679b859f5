# Just a fake enum and namespace to keep verdict-related strings in. These
# values are written to reports and database rows, so never rename them.

LOCALLY_IDENTIFIABLE = "locally-identifiable"
UNIDENTIFIABLE = "unidentifiable"

# graph rule verdicts
MODEL_IDENTIFIABLE = "model-identifiable"
MODEL_UNIDENTIFIABLE = "model-unidentifiable"
PARAM_GLOBALLY_IDENTIFIABLE = "param-globally-identifiable"
PARAM_UNIDENTIFIABLE = "param-unidentifiable"

DESCRIPTIONS = {
    LOCALLY_IDENTIFIABLE: "locally identifiable (global status undetermined)",
    UNIDENTIFIABLE: "unidentifiable",
    MODEL_IDENTIFIABLE: "model is identifiable",
    MODEL_UNIDENTIFIABLE: "model is unidentifiable",
    PARAM_GLOBALLY_IDENTIFIABLE: "parameters globally identifiable",
    PARAM_UNIDENTIFIABLE: "parameters unidentifiable",
}

# reparametrization outcomes
NOT_APPLICABLE = "not-applicable"
NOT_NEEDED = "not-needed"
PASSED = "passed"
FAILED = "failed"

ASSUMPTIONS = [
    "single experiment, generic inputs, parameters and initial conditions",
    "one input-output equation per output; no cross-output relations are used",
    "verdicts are local: locally identifiable does not imply globally identifiable",
]


def get_display(verdict: str) -> str:
    return DESCRIPTIONS.get(verdict, verdict)


def from_rank(kernel_dim: int) -> str:
    return LOCALLY_IDENTIFIABLE if kernel_dim == 0 else UNIDENTIFIABLE
