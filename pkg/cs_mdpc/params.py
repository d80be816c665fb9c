"""Parameter sets: the published presets, their QC variants and custom sets."""

from dataclasses import dataclass, replace
from math import prod
from pathlib import Path
from typing import Final

from .cwe import message_capacity
from .cyclosym import LayerShape
from .data import presets
from .data.presets import PresetRow
from .errors import ParameterFileError, UsageError
from .utils import assert_condition

NO_SECURITY_CLAIM: Final = "no security claim"


@dataclass(frozen=True, slots=True)
class ParameterSet:
    """A CS-MDPC (or plain QC-MDPC) parameter set for Niederreiter encryption.

    Args:
        id: Identifier, e.g. ``cs1-80`` or ``cs2-128-qc``.
        n0: Number of circulant blocks.
        shape: Layer shape; ``r`` is the product of its factors.
        d_v: Weight of every private block.
        t: Error weight.
        theta0: Initial decoder threshold.
        delta: Initial threshold margin.
        sec_bits: Claimed security in bits; ``None`` for sets without a claim.
        cyclosymmetric: ``True`` for CS-MDPC keys, ``False`` for plain QC-MDPC keys.
        published_pk_bits: Public key size printed next to the preset, if any.
    """

    id: str
    n0: int
    shape: LayerShape
    d_v: int
    t: int
    theta0: int
    delta: int
    sec_bits: int | None = None
    cyclosymmetric: bool = True
    published_pk_bits: int | None = None

    def __post_init__(self) -> None:
        """Validate the relations between the parameters."""
        assert_condition(self.n0 >= 2, lambda: f"n0 must be at least 2, got {self.n0}")
        assert_condition(
            1 <= self.d_v <= self.shape.r, lambda: f"d_v must lie in [1, r], got {self.d_v}"
        )
        assert_condition(
            0 <= self.t <= self.n0 * self.shape.r, lambda: f"t must lie in [0, n], got {self.t}"
        )
        assert_condition(
            0 <= self.delta < self.theta0 <= self.d_v,
            lambda: f"need 0 <= delta < theta0 <= d_v, got {(self.delta, self.theta0, self.d_v)}",
        )

    @property
    def r(self) -> int:
        """Block size (also the cryptogram length)."""
        return self.shape.r

    @property
    def n(self) -> int:
        """Code length n0 * r."""
        return self.n0 * self.shape.r

    @property
    def k(self) -> int:
        """Code dimension (n0 - 1) * r."""
        return (self.n0 - 1) * self.shape.r

    @property
    def mode(self) -> str:
        """``CS`` or ``QC``."""
        return "CS" if self.cyclosymmetric else "QC"

    @property
    def block_bits(self) -> int:
        """Bits per serialized public block: compressed in CS mode, dense in QC mode."""
        if self.cyclosymmetric:
            return prod(p // 2 + 1 for p in self.shape.factors)
        return self.shape.r

    @property
    def pk_bits(self) -> int:
        """Public key size in bits, (n0 - 1) * block_bits."""
        return (self.n0 - 1) * self.block_bits

    @property
    def ct_bits(self) -> int:
        """Cryptogram size in bits."""
        return self.shape.r

    @property
    def message_capacity(self) -> int:
        """Largest byte count k with 2^(8k + 1) <= C(n, t)."""
        return message_capacity(self.n, self.t)

    @property
    def is_preset(self) -> bool:
        """Whether this is exactly one of the built-in sets."""
        return PRESETS.get(self.id) == self

    @property
    def security_label(self) -> str:
        """``2^sec`` for presets, a disclaimer for everything else."""
        if self.is_preset and self.sec_bits is not None:
            return f"2^{self.sec_bits}"
        return NO_SECURITY_CLAIM

    def as_qc(self) -> "ParameterSet":
        """Return the plain QC-MDPC variant with the same sizes and decoder settings."""
        if not self.cyclosymmetric:
            return self
        return replace(
            self, id=f"{self.id}-qc", cyclosymmetric=False, published_pk_bits=None
        )


def _from_row(row: PresetRow) -> ParameterSet:
    return ParameterSet(
        row.id,
        row.n0,
        LayerShape.parse(row.shape),
        row.d_v,
        row.t,
        row.theta0,
        row.delta,
        row.sec_bits,
        True,
        row.published_pk_bits,
    )


def _build_presets() -> dict[str, ParameterSet]:
    table: dict[str, ParameterSet] = {}
    for row in presets.by_id.values():
        params = _from_row(row)
        table[params.id] = params
        qc = params.as_qc()
        table[qc.id] = qc
    return table


PRESETS: Final[dict[str, ParameterSet]] = _build_presets()


def custom_params(
    id: str,
    n0: int,
    shape: LayerShape | str,
    d_v: int,
    t: int,
    theta0: int,
    delta: int,
    *,
    sec_bits: int | None = None,
    cyclosymmetric: bool = True,
) -> ParameterSet:
    """Build a parameter set outside the presets; it carries no security claim.

    Raises:
        UsageError: If the parameters are inconsistent.
    """
    layer_shape = LayerShape.parse(shape) if isinstance(shape, str) else shape
    return ParameterSet(
        id, n0, layer_shape, d_v, t, theta0, delta, sec_bits, cyclosymmetric
    )


def load_params(source: str, *, qc: bool = False) -> ParameterSet:
    """Resolve a preset id or read a one-line custom parameter file.

    Args:
        source: Preset id (``cs1-80``, ``cs2-128-qc``, ...) or a path to a parameter file.
        qc: Return the plain QC-MDPC variant.

    Raises:
        UsageError: If ``source`` is neither a preset id nor an existing file.
        ParameterFileError: If the file is malformed or holds other than one set.
        OSError: If the file cannot be read.
    """
    if source in PRESETS:
        params = PRESETS[source]
    else:
        path = Path(source)
        if not path.is_file():
            known = ", ".join(sorted(PRESETS))
            raise UsageError(f"unknown parameter set {source!r}; presets are {known}")
        rows = presets.parse_text(path.read_text(encoding="utf-8"))
        if len(rows) != 1:
            raise ParameterFileError(f"{source}: expected one parameter line, found {len(rows)}")
        (row,) = rows
        try:
            params = custom_params(
                row.id,
                row.n0,
                row.shape,
                row.d_v,
                row.t,
                row.theta0,
                row.delta,
                sec_bits=row.sec_bits,
            )
        except UsageError as error:
            raise ParameterFileError(f"{source}: {error}") from error
    return params.as_qc() if qc else params


def match_preset(
    n0: int,
    shape: LayerShape,
    d_v: int,
    t: int,
    theta0: int,
    delta: int,
    *,
    cyclosymmetric: bool = True,
) -> ParameterSet:
    """Return the preset with these values, or a custom set named ``custom``.

    Used to restore the identity of parameters read back from a file header.

    Raises:
        UsageError: If the values are inconsistent.
    """
    for params in PRESETS.values():
        if (
            params.n0 == n0
            and params.shape == shape
            and (params.d_v, params.t, params.theta0, params.delta) == (d_v, t, theta0, delta)
            and params.cyclosymmetric == cyclosymmetric
        ):
            return params
    return custom_params(
        "custom", n0, shape, d_v, t, theta0, delta, cyclosymmetric=cyclosymmetric
    )


__all__ = [
    "NO_SECURITY_CLAIM",
    "ParameterSet",
    "PRESETS",
    "custom_params",
    "load_params",
    "match_preset",
]
