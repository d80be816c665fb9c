"""Cyclosymmetric (palindromic) ring elements and their compressed form.

With r = p_1 ... p_L (L = 1 or 2, coprime), a ring element is
cyclosymmetric when its support is closed under the maps m -> CRT(+-k_1, ..., +-k_L),
where k_i = m mod p_i. Each orbit is stored by one representative bit, so a block
of r bits compresses to prod(floor(p_i / 2) + 1) bits.
"""

from dataclasses import dataclass
from functools import cache
from math import gcd, prod

import numpy as np

from .errors import NonzeroPadding
from .ring_f2 import DenseRingElement, SparseSupport
from .utils import assert_condition, byte_length


@dataclass(frozen=True, slots=True)
class LayerShape:
    """Factorisation r = p_1 (one layer) or r = p_1 * p_2 (two layers).

    Args:
        factors: One or two layer sizes, at least 3 and coprime.
    """

    factors: tuple[int, ...]

    def __post_init__(self) -> None:
        """Validate the factorisation."""
        assert_condition(
            len(self.factors) in (1, 2), lambda: f"expected 1 or 2 layer sizes, got {self.factors}"
        )
        assert_condition(
            all(p >= 3 for p in self.factors),
            lambda: f"layer sizes must be at least 3, got {self.factors}",
        )
        assert_condition(
            gcd(*self.factors) == 1 or self.layers == 1,
            lambda: f"layer sizes must be coprime, got {self.factors}",
        )

    @property
    def layers(self) -> int:
        """Number of layers L."""
        return len(self.factors)

    @property
    def r(self) -> int:
        """Block size: the product of the layer sizes."""
        return prod(self.factors)

    @property
    def compressed_length(self) -> int:
        """Number of orbits, i.e. bits per compressed block."""
        return prod(p // 2 + 1 for p in self.factors)

    def crt(self, k: int, l: int) -> int:  # noqa: E741
        """Return the m in [0, r) with m = k mod p_1 and m = l mod p_2 (two layers only)."""
        assert_condition(self.layers == 2, "CRT needs a two-layer shape")
        p1, p2 = self.factors
        u1 = p2 * pow(p2, -1, p1)
        u2 = p1 * pow(p1, -1, p2)
        return (k * u1 + l * u2) % self.r

    def representatives(self) -> tuple[int, ...]:
        """Return the representative coordinate of every orbit, in compressed order.

        One layer: j = 0, ..., floor(p/2). Two layers: CRT(k, l) for (k, l) in
        lexicographic order with k <= floor(p_1/2), l <= floor(p_2/2).
        """
        return tuple(_tables(self).representatives.tolist())

    def __str__(self) -> str:
        """Format as ``p`` or ``p1xp2``, the notation used in parameter files."""
        return "x".join(str(p) for p in self.factors)

    @classmethod
    def parse(cls, text: str) -> "LayerShape":
        """Parse the ``p`` / ``p1xp2`` notation.

        Raises:
            UsageError: If the text is not one or two valid layer sizes.
        """
        parts = text.lower().split("x")
        assert_condition(
            all(part.isdigit() for part in parts), lambda: f"invalid layer shape: {text!r}"
        )
        return cls(tuple(int(part) for part in parts))


@dataclass(frozen=True, slots=True)
class _OrbitTables:
    representatives: np.ndarray  # compressed index -> representative coordinate
    orbit_index: np.ndarray  # coordinate -> compressed index
    orbit_sizes: np.ndarray  # compressed index -> orbit size


@cache
def _tables(shape: LayerShape) -> _OrbitTables:
    r = shape.r
    m = np.arange(r, dtype=np.int64)
    if shape.layers == 1:
        (p,) = shape.factors
        orbit_index = np.minimum(m, (r - m) % r)
        representatives = np.arange(p // 2 + 1, dtype=np.int64)
        sizes = np.where((representatives == 0) | (2 * representatives == p), 1, 2)
    else:
        p1, p2 = shape.factors
        width = p2 // 2 + 1
        k = m % p1
        l = m % p2  # noqa: E741
        orbit_index = np.minimum(k, p1 - k) * width + np.minimum(l, p2 - l)
        kk, ll = np.divmod(np.arange(shape.compressed_length, dtype=np.int64), width)
        representatives = (kk * (p2 * pow(p2, -1, p1)) + ll * (p1 * pow(p1, -1, p2))) % r
        sizes = (1 + ((kk != 0) & (2 * kk != p1))) * (1 + ((ll != 0) & (2 * ll != p2)))
    return _OrbitTables(representatives, orbit_index, sizes.astype(np.int64))


@dataclass(frozen=True, slots=True)
class CompressedBlock:
    """One bit per orbit of a cyclosymmetric block.

    Args:
        shape: Layer shape of the block.
        bits: Bit i is set when the orbit of the i-th representative is in the support.
    """

    shape: LayerShape
    bits: int

    def __post_init__(self) -> None:
        """Reject bits beyond the compressed length."""
        assert_condition(
            0 <= self.bits < (1 << self.shape.compressed_length),
            lambda: f"compressed block does not fit in {self.shape.compressed_length} bits",
        )

    def to_bytes(self) -> bytes:
        """Serialize to ceil(compressed_length / 8) little-endian bytes."""
        return self.bits.to_bytes(byte_length(self.shape.compressed_length), "little")

    @classmethod
    def from_bytes(cls, shape: LayerShape, data: bytes) -> "CompressedBlock":
        """Parse the output of :meth:`to_bytes`.

        Raises:
            UsageError: If the length is wrong.
            NonzeroPadding: If bits past the compressed length are set.
        """
        length = shape.compressed_length
        assert_condition(
            len(data) == byte_length(length),
            lambda: f"expected {byte_length(length)} bytes, got {len(data)}",
        )
        bits = int.from_bytes(data, "little")
        if bits >> length:
            raise NonzeroPadding(f"padding bits above position {length} are not zero")
        return cls(shape, bits)


def orbit(m: int, shape: LayerShape) -> tuple[int, ...]:
    """Return the sorted orbit of coordinate ``m``.

    Raises:
        UsageError: If ``m`` is outside ``[0, r)``.
    """
    r = shape.r
    assert_condition(0 <= m < r, lambda: f"coordinate {m} outside [0, {r})")
    if shape.layers == 1:
        return tuple(sorted({m, (r - m) % r}))
    p1, p2 = shape.factors
    k, l = m % p1, m % p2  # noqa: E741
    return tuple(sorted({shape.crt(sk % p1, sl % p2) for sk in (k, -k) for sl in (l, -l)}))


def _coefficients(a: DenseRingElement | SparseSupport) -> np.ndarray:
    coefficients = np.zeros(a.r, dtype=np.uint8)
    support = a.support() if isinstance(a, DenseRingElement) else a.support
    coefficients[list(support)] = 1
    return coefficients


def is_cyclosymmetric(a: DenseRingElement | SparseSupport, shape: LayerShape) -> bool:
    """Return whether the support of ``a`` is a union of whole orbits.

    Raises:
        UsageError: If the block size of ``a`` differs from ``shape.r``.
    """
    assert_condition(a.r == shape.r, lambda: f"block size {a.r} does not match shape {shape}")
    tables = _tables(shape)
    coefficients = _coefficients(a)
    closure = coefficients[tables.representatives][tables.orbit_index]
    return bool(np.array_equal(coefficients, closure))


def compress(a: DenseRingElement | SparseSupport, shape: LayerShape) -> CompressedBlock:
    """Keep one bit per orbit.

    Raises:
        UsageError: If ``a`` is not cyclosymmetric for ``shape``.
    """
    assert_condition(is_cyclosymmetric(a, shape), "element is not cyclosymmetric")
    picked = _coefficients(a)[_tables(shape).representatives]
    bits = int.from_bytes(np.packbits(picked, bitorder="little").tobytes(), "little")
    return CompressedBlock(shape, bits)


def expand(block: CompressedBlock) -> DenseRingElement:
    """Rebuild the full block as the union of the orbits flagged in ``block``."""
    shape = block.shape
    tables = _tables(shape)
    raw = np.frombuffer(block.to_bytes(), dtype=np.uint8)
    flags = np.unpackbits(raw, bitorder="little")[: shape.compressed_length]
    coefficients = flags[tables.orbit_index]
    bits = int.from_bytes(np.packbits(coefficients, bitorder="little").tobytes(), "little")
    return DenseRingElement(shape.r, bits)


def _reachable(weight: int, ones: int, twos: int, fours: int) -> bool:
    """Whether ``weight`` is a sum of at most the given numbers of 1-, 2- and 4-orbits."""
    for a in range(min(ones, weight) + 1):
        rest = weight - a
        if rest % 2:
            continue
        half = rest // 2
        low = max(0, -(-(half - twos) // 2))
        if low <= min(fours, half // 2):
            return True
    return False


def _sample_orbits(sizes: np.ndarray, weight: int, rng: np.random.Generator) -> list[int]:
    """Pick distinct pool entries whose sizes sum to exactly ``weight``.

    Orbits are drawn uniformly and rejected when they are already taken or would leave
    a remainder that the unused orbits cannot fill.

    Raises:
        UsageError: If ``weight`` is not reachable with the pool at all.
    """
    available = {size: int(np.count_nonzero(sizes == size)) for size in (1, 2, 4)}
    assert_condition(
        _reachable(weight, available[1], available[2], available[4]),
        lambda: f"weight {weight} cannot be written as a union of orbits",
    )
    chosen: set[int] = set()
    remaining = weight
    while remaining:
        for index in rng.integers(0, len(sizes), size=64).tolist():
            size = int(sizes[index])
            if index in chosen or size > remaining:
                continue
            available[size] -= 1
            if not _reachable(remaining - size, available[1], available[2], available[4]):
                available[size] += 1
                continue
            chosen.add(index)
            remaining -= size
            if not remaining:
                break
    return sorted(chosen)


def sample_sparse_cyclosymmetric(
    shape: LayerShape, w: int, rng: np.random.Generator
) -> SparseSupport:
    """Sample a cyclosymmetric block of Hamming weight exactly ``w``.

    Odd ``w`` needs an orbit of size one. {0} always is; an even layer size adds a
    second such orbit.

    Args:
        shape: Layer shape of the block.
        w: Target weight.
        rng: Source of randomness.

    Raises:
        UsageError: If no union of orbits has weight ``w``.
    """
    assert_condition(w >= 0, lambda: f"weight must be non-negative, got {w}")
    tables = _tables(shape)
    coords: list[int] = []
    for index in _sample_orbits(tables.orbit_sizes, w, rng):
        coords.extend(orbit(int(tables.representatives[index]), shape))
    return SparseSupport.from_coords(shape.r, coords)


def sample_cyclosymmetric_error(
    shape: LayerShape, n0: int, t: int, rng: np.random.Generator
) -> tuple[int, ...]:
    """Sample an error of total weight ``t`` whose every block is cyclosymmetric.

    Returns:
        tuple[int, ...]: Sorted coordinates in ``[0, n0 * r)``.

    Raises:
        UsageError: If ``t`` is not reachable with the orbits of ``n0`` blocks.
    """
    tables = _tables(shape)
    orbits_per_block = shape.compressed_length
    pool = np.tile(tables.orbit_sizes, n0)
    coords: list[int] = []
    for index in _sample_orbits(pool, t, rng):
        block, local = divmod(index, orbits_per_block)
        offset = block * shape.r
        coords.extend(offset + c for c in orbit(int(tables.representatives[local]), shape))
    return tuple(sorted(coords))


__all__ = [
    "LayerShape",
    "CompressedBlock",
    "orbit",
    "is_cyclosymmetric",
    "compress",
    "expand",
    "sample_sparse_cyclosymmetric",
    "sample_cyclosymmetric_error",
]
