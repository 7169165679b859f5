"""Model files.

A model file is YAML (so plain JSON works too) with the keys

    compartments: 3
    edges: [[1, 2], [2, 3], [3, 2], [3, 1]]   # [from, to] is parameter a_{to,from}
    inputs: [1]
    outputs: [1]
    leaks: [1, 2, 3]                           # optional, default none
    name: optional
    notes: optional
    leak_convention: environment | total       # optional, default environment

Indices are 1-based. Unknown keys are rejected.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any

import yaml

from identifiability.compartments import CompModel, validate_model
from identifiability.exceptions import (
    EmptyInputs,
    EmptyOutputs,
    ModelFileError,
    ModelValidationError,
)

logger = logging.getLogger(__name__)

REQUIRED_KEYS = ("compartments", "edges", "inputs", "outputs")
OPTIONAL_KEYS = ("leaks", "name", "notes", "leak_convention")
KNOWN_KEYS = REQUIRED_KEYS + OPTIONAL_KEYS

# first word of a validation reason -> the key it is about
_REASON_KEYS = {
    "compartments": "compartments",
    "edge": "edges",
    "input": "inputs",
    "inputs": "inputs",
    "output": "outputs",
    "outputs": "outputs",
    "leak": "leaks",
    "leaks": "leaks",
    "leak_convention": "leak_convention",
}
_ERROR_KEYS = {EmptyInputs: "inputs", EmptyOutputs: "outputs"}


def _key_lines(text: str) -> dict[str, int]:
    """1-based line of each top-level key, where the document is a mapping."""
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.YAMLError:
        return {}
    if not isinstance(node, yaml.MappingNode):
        return {}
    return {
        key.value: key.start_mark.line + 1
        for key, _ in node.value
        if isinstance(key, yaml.ScalarNode)
    }


def _where(source: str, lines: dict[str, int], key: str) -> str:
    if key in lines:
        return f"{source}, line {lines[key]} ({key})"
    if key:
        return f"{source} ({key})"
    return source


def load_model(text: str, source: str = "<model>") -> CompModel:
    try:
        raw: Any = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        where = f"{source}, line {mark.line + 1}" if mark is not None else source
        problem = getattr(e, "problem", None) or str(e).splitlines()[0]
        msg = f"{where}: not valid YAML or JSON: {problem}"
        raise ModelFileError(msg) from None
    if not isinstance(raw, dict):
        msg = f"{source}: expected a mapping with keys {', '.join(REQUIRED_KEYS)}"
        raise ModelFileError(msg)
    lines = _key_lines(text)
    unknown = sorted(str(k) for k in raw if k not in KNOWN_KEYS)
    if unknown:
        msg = f"{_where(source, lines, unknown[0])}: unknown key {unknown[0]!r}; allowed keys are {', '.join(KNOWN_KEYS)}"
        raise ModelFileError(msg)
    missing = [k for k in REQUIRED_KEYS if k not in raw]
    if missing:
        msg = f"{source}: missing key {missing[0]!r}"
        raise ModelFileError(msg)
    try:
        model = validate_model(raw)
    except ModelValidationError as e:
        first = e.reason.split(maxsplit=1)[0] if e.reason else ""
        key = _REASON_KEYS.get(first) or _ERROR_KEYS.get(type(e), "")
        raise type(e)(f"{_where(source, lines, key)}: {e.reason}") from None
    logger.debug("loaded %s: %d compartments, %d parameters", source, model.n, model.num_params)
    return model


def parse_model_file(path: str | Path) -> CompModel:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        msg = f"{path}: cannot read model file ({e.strerror})"
        raise ModelFileError(msg) from None
    model = load_model(text, str(path))
    if not model.name:
        model = CompModel(
            n=model.n,
            edges=model.edges,
            inputs=model.inputs,
            outputs=model.outputs,
            leaks=model.leaks,
            leak_convention=model.leak_convention,
            name=path.stem,
            notes=model.notes,
        )
    return model
