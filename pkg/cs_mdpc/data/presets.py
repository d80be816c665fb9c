"""Parse the bundled parameter presets and build lookup tables."""

import re
from dataclasses import dataclass
from importlib import resources
from typing import Final

from ..errors import ParameterFileError
from ..utils import insert_into

_RAW_RESOURCE = resources.files("cs_mdpc.data.raw").joinpath("presets.txt")
_RAW_TEXT = _RAW_RESOURCE.read_text(encoding="utf-8")

_LINE_PATTERN: Final = re.compile(
    r"^(?P<id>[A-Za-z0-9_.-]+)\s+(?P<n0>\d+)\s+(?P<shape>\d+(?:[xX]\d+)?)"
    r"\s+(?P<d_v>\d+)\s+(?P<t>\d+)\s+(?P<theta0>\d+)\s+(?P<delta>\d+)"
    r"(?:\s+(?P<sec>\d+)(?:\s+(?P<published>\d+))?)?$"
)


@dataclass(frozen=True, slots=True)
class PresetRow:
    """One line of a parameter file.

    Args:
        id: Parameter set identifier.
        n0: Number of circulant blocks.
        shape: Layer notation, ``p`` or ``p1xp2``.
        d_v: Column weight of the private blocks.
        t: Error weight.
        theta0: Initial decoder threshold.
        delta: Threshold margin.
        sec_bits: Claimed security level in bits, when given.
        published_pk_bits: Public key size as printed in the source tables, when given.
    """

    id: str
    n0: int
    shape: str
    d_v: int
    t: int
    theta0: int
    delta: int
    sec_bits: int | None
    published_pk_bits: int | None


def parse_line(line: str) -> PresetRow:
    """Parse ``id n0 p1[xp2] d_v t theta0 delta [sec [published_pk_bits]]``.

    Raises:
        ParameterFileError: If the line does not follow that layout.
    """
    match = _LINE_PATTERN.match(line.strip())
    if not match:
        raise ParameterFileError(f"Invalid parameter line: {line.strip()[:60]!r}")

    def optional(name: str) -> int | None:
        value = match[name]
        return None if value is None else int(value)

    return PresetRow(
        match["id"],
        int(match["n0"]),
        match["shape"].lower(),
        int(match["d_v"]),
        int(match["t"]),
        int(match["theta0"]),
        int(match["delta"]),
        optional("sec"),
        optional("published"),
    )


def parse_text(text: str) -> list[PresetRow]:
    """Parse every non-blank, non-comment line of a parameter file.

    Raises:
        ParameterFileError: If any line is malformed.
    """
    return [
        parse_line(line)
        for line in text.splitlines()
        if line.strip() and not line.lstrip().startswith("#")
    ]


by_id: dict[str, PresetRow] = {}
by_layers: dict[int, list[PresetRow]] = {}


def _parse_raw_text(raw_text: str) -> None:
    """Populate lookup dictionaries from the bundled resource."""
    for row in parse_text(raw_text):
        if row.id in by_id:
            raise ParameterFileError(f"Duplicate preset id: {row.id}")
        by_id[row.id] = row
        insert_into(by_layers, row.shape.count("x") + 1, row)


_parse_raw_text(_RAW_TEXT)

__all__ = ["PresetRow", "parse_line", "parse_text", "by_id", "by_layers"]
