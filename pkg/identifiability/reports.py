"""Text and JSON renderings of analysis results.

Every report starts with the same header: tool version, the prime, the seed,
the number of trials, the confidence line and the modelling assumptions. JSON
reports are canonical (sorted keys, two-space indent, trailing newline), so
loading one and rendering it again gives the same bytes.
"""

from __future__ import annotations

import json
from collections.abc import Iterable, Sequence
from typing import Any

from identifiability import __version__, verdicts
from identifiability.compartments import CompModel, label
from identifiability.criteria import MonomialReport, RuleHit
from identifiability.engine import Confidence, IdentReport, ScalingSymmetry
from identifiability.io_equations import CoefficientMap, IOEquation
from identifiability.polyring import PRIME
from identifiability.reparam import NotApplicable, Reparametrization
from identifiability.search import AdjustmentResult


def render_json(data: dict[str, Any]) -> str:
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def render_text(lines: Iterable[str]) -> str:
    return "\n".join(lines) + "\n"


def header(seed: int, trials: int, confidence: Confidence) -> dict[str, Any]:
    return {
        "tool": "compid",
        "version": __version__,
        "prime": PRIME,
        "seed": seed,
        "trials": trials,
        "assumptions": list(verdicts.ASSUMPTIONS),
        "confidence": confidence.confidence,
        "confidence_line": confidence.line(),
    }


def header_lines(data: dict[str, Any]) -> list[str]:
    lines = [
        f"compid {data['version']}  p = {data['prime']}  seed = {data['seed']}  trials = {data['trials']}",
        data["confidence_line"],
    ]
    lines.extend(f"assuming {assumption}" for assumption in data["assumptions"])
    return lines


def model_summary(m: CompModel) -> dict[str, Any]:
    summary = m.to_dict()
    summary["name"] = m.name
    summary["model_hash"] = m.model_hash
    summary["parameters"] = list(m.param_names)
    return summary


def verdict_line(report: IdentReport) -> str:
    return f"{verdicts.get_display(report.model_verdict)}; rank {report.rank}/{report.num_params}"


# -- analyze -----------------------------------------------------------------------


def analyze_data(
    m: CompModel,
    report: IdentReport,
    symmetry: ScalingSymmetry,
    seed: int,
    trials: int,
    params: Sequence[str] | None = None,
) -> dict[str, Any]:
    names = list(params) if params else list(m.param_names)
    return {
        **header(seed, trials, report.confidence),
        "command": "analyze",
        "model": model_summary(m),
        "verdict": report.model_verdict,
        "verdict_text": verdicts.get_display(report.model_verdict),
        "rank": report.rank,
        "num_params": report.num_params,
        "kernel_dim": report.kernel_dim,
        "parameters": {name: report.per_param[name] for name in names},
        "scaling": {
            "dim": symmetry.dim,
            "complete": symmetry.complete,
            "basis": [list(v) for v in symmetry.basis],
            "invariants": [f.format(m.param_names) for f in symmetry.invariant_monomials()],
        },
        "notes": list(report.notes),
    }


def analyze_lines(data: dict[str, Any]) -> list[str]:
    width = max((len(name) for name in data["parameters"]), default=0)
    lines = [
        *header_lines(data),
        "",
        _model_line_from(data["model"]),
        f"{data['verdict_text']}; rank {data['rank']}/{data['num_params']}",
        f"kernel dimension {data['kernel_dim']}, scaling symmetries {data['scaling']['dim']}"
        + (" (complete)" if data["scaling"]["complete"] and data["kernel_dim"] else ""),
        "",
    ]
    lines.extend(
        f"  {name.ljust(width)}  {verdicts.get_display(verdict)}"
        for name, verdict in data["parameters"].items()
    )
    lines.extend(data["notes"])
    return lines


def _model_line_from(model: dict[str, Any]) -> str:
    name = f"{model['name']}: " if model.get("name") else ""
    edges = ";".join(f"{s}>{t}" for s, t in model["edges"]) or "-"
    sets = "  ".join(
        f"{title} {{{', '.join(str(c) for c in model[key])}}}"
        for title, key in (("In", "inputs"), ("Out", "outputs"), ("Leak", "leaks"))
    )
    return f"{name}n = {model['compartments']}  edges {edges}  {sets}"


# -- classify ------------------------------------------------------------------------------


def classify_data(
    m: CompModel,
    hits: Sequence[RuleHit],
    seed: int,
    trials: int,
    confidence: Confidence,
    report: IdentReport | None = None,
    agrees: bool | None = None,
) -> dict[str, Any]:
    data = {
        **header(seed, trials, confidence),
        "command": "classify",
        "model": model_summary(m),
        "rule_hits": [
            {
                "rule": hit.rule_id,
                "verdict": hit.verdict,
                "parameters": list(hit.affected_params),
                "citation": hit.citation,
            }
            for hit in hits
        ],
    }
    if report is not None:
        data["rank_verdict"] = report.model_verdict
        data["agreement"] = agrees
    return data


def classify_lines(data: dict[str, Any]) -> list[str]:
    lines = [*header_lines(data), "", _model_line_from(data["model"])]
    if not data["rule_hits"]:
        lines.append("no graph rule applies")
    for hit in data["rule_hits"]:
        params = f" [{', '.join(hit['parameters'])}]" if hit["parameters"] else ""
        lines.append(f"{hit['rule']}: {verdicts.get_display(hit['verdict'])}{params}  ({hit['citation']})")
    if "rank_verdict" in data:
        lines.append(f"rank engine: {verdicts.get_display(data['rank_verdict'])}")
        lines.append(f"agreement: {'yes' if data['agreement'] else 'NO'}")
    return lines


# -- io-eq ----------------------------------------------------------------------------------


def io_eq_data(
    m: CompModel, equations: Sequence[IOEquation], cmap: CoefficientMap, seed: int, trials: int
) -> dict[str, Any]:
    names = m.param_names
    return {
        **header(seed, trials, Confidence.of_map(cmap, trials)),
        "command": "io-eq",
        "model": model_summary(m),
        "equations": [
            {
                "output": label(eq.output),
                "support": [label(c) for c in eq.support],
                "text": eq.format(names),
                "denominator": [c.format(names) for c in eq.denominator],
                "numerators": {f"u{label(j)}": [c.format(names) for c in coeffs] for j, coeffs in eq.numerators},
            }
            for eq in equations
        ],
        "coefficients": [
            {"provenance": entry.provenance(), "polynomial": entry.polynomial.format(names)}
            for entry in cmap.entries
        ],
    }


def io_eq_lines(data: dict[str, Any]) -> list[str]:
    lines = [*header_lines(data), "", _model_line_from(data["model"]), ""]
    lines.extend(eq["text"] for eq in data["equations"])
    lines.append("")
    lines.append("coefficient map:")
    width = max((len(c["provenance"]) for c in data["coefficients"]), default=0)
    lines.extend(f"  {c['provenance'].ljust(width)}  {c['polynomial']}" for c in data["coefficients"])
    return lines


# -- functions --------------------------------------------------------------------------------


def functions_data(
    m: CompModel,
    results: Sequence[tuple[str, str]],
    seed: int,
    trials: int,
    confidence: Confidence,
    monomials: MonomialReport | None = None,
) -> dict[str, Any]:
    data: dict[str, Any] = {
        **header(seed, trials, confidence),
        "command": "functions",
        "model": model_summary(m),
        "functions": [{"expression": text, "verdict": verdict} for text, verdict in results],
    }
    if monomials is not None:
        data["monomials"] = [
            {
                "kind": candidate.kind,
                "support": [label(c) for c in candidate.support],
                "monomial": candidate.monomial.format(m.param_names),
                "verdict": verdict,
            }
            for candidate, verdict in monomials.candidates
        ]
        data["truncated"] = monomials.truncated
    return data


def functions_lines(data: dict[str, Any]) -> list[str]:
    lines = [*header_lines(data), "", _model_line_from(data["model"])]
    width = max((len(f["expression"]) for f in data["functions"]), default=0)
    lines.extend(f"  {f['expression'].ljust(width)}  {verdicts.get_display(f['verdict'])}" for f in data["functions"])
    if "monomials" in data:
        lines.append("")
        lines.append("cycle and path monomials" + (" (truncated)" if data["truncated"] else "") + ":")
        for item in data["monomials"]:
            support = "-".join(str(c) for c in item["support"])
            lines.append(f"  {item['kind']} {support}: {item['monomial']}  {verdicts.get_display(item['verdict'])}")
    return lines


# -- reparam ------------------------------------------------------------------------------------


def reparam_data(
    m: CompModel,
    result: Reparametrization | NotApplicable,
    seed: int,
    trials: int,
    confidence: Confidence,
) -> dict[str, Any]:
    return {
        **header(seed, trials, confidence),
        "command": "reparam",
        "model": model_summary(m),
        "reparametrization": result.to_dict(),
    }


def reparam_lines(data: dict[str, Any]) -> list[str]:
    lines = [*header_lines(data), "", _model_line_from(data["model"]), ""]
    body = data["reparametrization"]
    if "status" in body:
        lines.append(f"{body['kind']}: {body['status']}")
        lines.append(body["reason"])
        lines.append(
            f"symmetry dimension {body['symmetry_dim']}, kernel dimension {body['kernel_dim']}, gap {body['gap']}"
        )
        return lines
    lines.append(f"{body['kind']} reparametrization")
    lines.extend(body["states"])
    lines.append("")
    lines.extend(body["system"])
    lines.append("")
    lines.extend(f"{p['name']} = {p['value']}" for p in body["parameters"])
    lines.extend(f"{p['name']} = {p['value']}" for p in body["derived"])
    lines.append("")
    verification = body["verification"]
    lines.append(f"verification: {verification['status']}")
    if verification["residual"]:
        lines.append(f"residual: {verification['residual']}")
    return lines


# -- suggest --------------------------------------------------------------------------------------


def suggest_data(
    m: CompModel, result: AdjustmentResult, seed: int, trials: int, confidence: Confidence
) -> dict[str, Any]:
    return {
        **header(seed, trials, confidence),
        "command": "suggest",
        "model": model_summary(m),
        "adjustment": result.to_dict(),
    }


def suggest_lines(data: dict[str, Any]) -> list[str]:
    body = data["adjustment"]
    lines = [*header_lines(data), "", _model_line_from(data["model"])]
    what = "added outputs" if body["kind"] == "add-outputs" else "fixed parameters"
    if body["exhausted_budget"]:
        lines.append(f"no set of at most {body['budget']} {what} makes the model identifiable")
    elif body["minimum"] == 0:
        lines.append("already identifiable; nothing to add")
    else:
        lines.append(f"minimum number of {what}: {body['minimum']} (minimal by cardinality)")
        lines.extend("  {" + ", ".join(s) + "}" for s in body["minimal_sets"])
    lines.append(f"{body['evaluations']} rank evaluations, {body['pruned']} candidates pruned by reachability")
    return lines


# -- enumerate ---------------------------------------------------------------------------------------


def enumerate_lines(family: str, n_min: int, n_max: int, path: str, summary: dict[str, int]) -> list[str]:
    return [
        f"{family} n = {n_min}..{n_max}: {summary['models']} models written to {path}",
        f"  identifiable {summary['identifiable']}, unidentifiable {summary['unidentifiable']}",
        f"  covered by a graph rule {summary['rule_covered']}, disagreements {summary['disagreements']}",
    ]
