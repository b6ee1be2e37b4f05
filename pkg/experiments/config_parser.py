"""
Line-oriented scenario config format.

    # comment
    [section]
    key = value
    list_key = 1.0, 2.0

Sections and keys are those of experiments.scenario. Values stay strings until
pydantic coerces them; comma-separated values become lists.
"""

import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from pydantic import ValidationError as PydanticValidationError

from core.errors import IOFailure, ParseError, ValidationError
from experiments.scenario import SECTION_MODELS, ScenarioSpec

logger = logging.getLogger(__name__)

COMMENT_PREFIXES = ("#", ";")


def _strip_comment(line: str) -> str:
    for marker in (" #", " ;", "\t#"):
        pos = line.find(marker)
        if pos >= 0:
            line = line[:pos]
    return line.strip()


def tokenize(text: str) -> Tuple[Dict[str, Dict[str, Any]], Dict[Tuple[str, ...], int]]:
    """
    Split config text into {section: {key: raw value}} plus a line map

    Raises:
        ParseError: malformed headers or assignments, duplicates, unknown sections
    """
    sections: Dict[str, Dict[str, Any]] = {}
    lines: Dict[Tuple[str, ...], int] = {}
    current: Optional[str] = None

    for number, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith(COMMENT_PREFIXES):
            continue
        line = _strip_comment(stripped)
        if line.startswith("["):
            if not line.endswith("]") or len(line) < 3:
                raise ParseError(f"malformed section header {line!r}", line=number)
            name = line[1:-1].strip()
            if name not in SECTION_MODELS:
                raise ParseError(f"unknown section [{name}]; expected one of {sorted(SECTION_MODELS)}", line=number)
            if name in sections:
                raise ParseError(f"duplicate section [{name}]", line=number)
            sections[name] = {}
            lines[(name,)] = number
            current = name
            continue
        if "=" not in line:
            raise ParseError(f"expected 'key = value', got {line!r}", line=number)
        if current is None:
            raise ParseError("assignment before any [section] header", line=number)
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ParseError("missing key before '='", line=number)
        if key in sections[current]:
            raise ParseError(f"duplicate key {key!r} in [{current}]", line=number)
        if value == "":
            raise ParseError(f"missing value for {key!r}", line=number)
        sections[current][key] = [item.strip() for item in value.split(",") if item.strip()] if "," in value else value
        lines[(current, key)] = number
    return sections, lines


def _error_line(loc: Tuple[Any, ...], lines: Dict[Tuple[str, ...], int]) -> Optional[int]:
    keys = [str(part) for part in loc if not isinstance(part, int)]
    for depth in range(len(keys), 0, -1):
        if tuple(keys[:depth]) in lines:
            return lines[tuple(keys[:depth])]
    return None


def parse_config(text: str) -> ScenarioSpec:
    """
    Parse and validate a scenario config

    Args:
        text: config text

    Returns:
        ScenarioSpec

    Raises:
        ParseError: syntax problems, unknown keys, missing sections (with line numbers)
        ValidationError: values violating an invariant
    """
    sections, lines = tokenize(text)
    if not sections:
        raise ParseError("empty config: missing [scenario] and [family] sections")
    kind = sections.get("scenario", {}).get("kind", "propagate")
    if "family" not in sections and kind == "propagate":
        raise ParseError("missing [family] section")
    if "scenario" not in sections:
        raise ParseError("missing [scenario] section")

    try:
        return ScenarioSpec.model_validate(sections)
    except PydanticValidationError as exc:
        first = exc.errors()[0]
        line = _error_line(first["loc"], lines)
        where = ".".join(str(part) for part in first["loc"])
        if first["type"] == "extra_forbidden":
            raise ParseError(f"unknown key {where!r}", line=line) from None
        if first["type"] == "missing":
            raise ParseError(f"missing required key {where!r}", line=line) from None
        prefix = f"line {line}: " if line else ""
        raise ValidationError(f"{prefix}{where}: {first['msg']}", invariant=first["msg"], line=line) from None


def load_config(path: Union[str, Path]) -> ScenarioSpec:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise IOFailure(f"cannot read config {path}: {exc}", path=str(path)) from exc
    logger.debug(f"Parsing config {path}")
    return parse_config(text)


def _format_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isfinite(value) and value == int(value) and abs(value) < 1e15:
            return str(int(value))
        return repr(value)
    if isinstance(value, (list, tuple)):
        if len(value) == 1:
            # a lone value still needs a comma to stay a list
            return f"{_format_value(value[0])},"
        return ", ".join(_format_value(item) for item in value)
    return str(value)


def serialize(spec: ScenarioSpec) -> str:
    """Config text that parses back to an equal spec"""
    data = spec.model_dump(exclude_none=True)
    blocks: List[str] = []
    for section in SECTION_MODELS:
        if section not in data:
            continue
        body = [f"{key} = {_format_value(value)}" for key, value in data[section].items()]
        blocks.append("\n".join([f"[{section}]"] + body))
    return "\n\n".join(blocks) + "\n"
