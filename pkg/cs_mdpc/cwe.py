"""Constant-weight encoding between integers modulo C(n, t) and weight-t words.

The bijection is the colexicographic combinadic: the support c_1 < ... < c_t has
rank C(c_1, 1) + C(c_2, 2) + ... + C(c_t, t). A byte-message layer on top packs
short messages into that integer range.
"""

from collections.abc import Iterable
from dataclasses import dataclass, field
from math import comb

import numpy as np

from .errors import MalformedPayload
from .utils import assert_condition


@dataclass(slots=True, eq=False)
class ErrorVector:
    """A sparse word of length ``n`` held as an unsorted coordinate list.

    The list has ``capacity`` preallocated slots of which the first ``ew`` are live,
    so the decoder can add and swap-delete coordinates without allocating.

    Args:
        n: Word length.
        capacity: Number of coordinate slots.
        coords: Slot storage; extended to ``capacity`` entries when shorter.
        ew: Number of live coordinates.
    """

    n: int
    capacity: int
    coords: list[int] = field(default_factory=list)
    ew: int = 0

    def __post_init__(self) -> None:
        """Preallocate the slots and validate the live coordinates."""
        assert_condition(self.n >= 1, lambda: f"length must be positive, got {self.n}")
        assert_condition(
            0 <= self.ew <= self.capacity,
            lambda: f"weight {self.ew} exceeds capacity {self.capacity}",
        )
        if len(self.coords) < self.capacity:
            self.coords.extend([0] * (self.capacity - len(self.coords)))
        live = self.coords[: self.ew]
        assert_condition(
            all(0 <= c < self.n for c in live), lambda: f"coordinate outside [0, {self.n})"
        )
        assert_condition(len(set(live)) == len(live), "coordinates must be distinct")

    @classmethod
    def empty(cls, n: int, capacity: int) -> "ErrorVector":
        """Return the zero word with ``capacity`` free slots."""
        return cls(n, capacity)

    @classmethod
    def from_support(
        cls, n: int, coords: Iterable[int], capacity: int | None = None
    ) -> "ErrorVector":
        """Build a word from its nonzero coordinates.

        Args:
            n: Word length.
            coords: Distinct coordinates in ``[0, n)``.
            capacity: Slot count; defaults to the number of coordinates.

        Raises:
            UsageError: If coordinates repeat, fall outside the word or exceed capacity.
        """
        live = [int(c) for c in coords]
        slots = len(live) if capacity is None else capacity
        return cls(n, slots, live, len(live))

    @property
    def weight(self) -> int:
        """Hamming weight (the number of live coordinates)."""
        return self.ew

    def support(self) -> tuple[int, ...]:
        """Return the live coordinates in increasing order."""
        return tuple(sorted(self.coords[: self.ew]))

    def clear(self) -> None:
        """Reset to the zero word, keeping the slots."""
        self.ew = 0

    def __eq__(self, other: object) -> bool:
        """Two words are equal when they have the same length and support."""
        if not isinstance(other, ErrorVector):
            return NotImplemented
        return self.n == other.n and self.support() == other.support()

    def __repr__(self) -> str:
        """Show the length and sorted support."""
        return f"ErrorVector(n={self.n}, support={self.support()})"


@dataclass(frozen=True, slots=True)
class PlaintextInteger:
    """A plaintext: an integer in ``[0, C(n, t))``."""

    value: int

    def __post_init__(self) -> None:
        """Reject negative values."""
        assert_condition(self.value >= 0, lambda: f"plaintext must be non-negative: {self.value}")


def binomial(n: int, k: int) -> int:
    """Return C(n, k) exactly; 0 when ``k > n``.

    Raises:
        UsageError: If ``n`` or ``k`` is negative.
    """
    assert_condition(n >= 0 and k >= 0, lambda: f"binomial needs n, k >= 0, got ({n}, {k})")
    return comb(n, k)


def unrank(m: PlaintextInteger | int, n: int, t: int) -> ErrorVector:
    """Map an integer below C(n, t) to the weight-t word of that colex rank.

    Coordinates are scanned from n - 1 down to 0 and coordinate c is taken while
    m >= C(c, remaining), with the binomial updated by one multiply and divide per step.

    Raises:
        UsageError: If ``m`` is out of range or ``t`` exceeds ``n``.
    """
    value = m.value if isinstance(m, PlaintextInteger) else m
    assert_condition(0 <= t <= n, lambda: f"weight {t} must lie in [0, {n}]")
    assert_condition(
        0 <= value < comb(n, t), lambda: f"plaintext out of range for C({n}, {t})"
    )
    coords: list[int] = []
    remaining = t
    c = n - 1
    current = comb(c, remaining) if c >= 0 else 0
    while remaining and c >= 0:
        if value >= current:
            value -= current
            coords.append(c)
            # C(c - 1, k - 1) = C(c, k) * k / c
            current = current * remaining // c if c else 0
            remaining -= 1
        else:
            # C(c - 1, k) = C(c, k) * (c - k) / c
            current = current * (c - remaining) // c if c else 0
        c -= 1
    return ErrorVector.from_support(n, coords)


def rank(e: ErrorVector, t: int) -> PlaintextInteger:
    """Return the colex rank of a weight-t word.

    Raises:
        UsageError: If the weight of ``e`` is not ``t``.
    """
    assert_condition(e.weight == t, lambda: f"expected weight {t}, got {e.weight}")
    return PlaintextInteger(sum(comb(c, i) for i, c in enumerate(e.support(), start=1)))


def sample_error(
    n: int, t: int, rng: np.random.Generator, capacity: int | None = None
) -> ErrorVector:
    """Draw a uniformly random word of length ``n`` and weight ``t``.

    Args:
        n: Word length.
        t: Weight.
        rng: Source of randomness.
        capacity: Slot count of the returned vector; defaults to ``t``.

    Raises:
        UsageError: If ``t`` is outside ``[0, n]``.
    """
    assert_condition(0 <= t <= n, lambda: f"weight {t} must lie in [0, {n}]")
    coords = rng.choice(n, size=t, replace=False).tolist()
    return ErrorVector.from_support(n, coords, capacity)


def message_capacity(n: int, t: int) -> int:
    """Return the largest byte count k with 2^(8k + 1) <= C(n, t)."""
    return max(0, (comb(n, t).bit_length() - 2) // 8)


_LENGTH_PREFIX = 2


def pack_message(message: bytes, n: int, t: int) -> PlaintextInteger:
    """Turn a byte message into a plaintext integer.

    The message is preceded by its 2-byte little-endian length and zero-padded to
    :func:`message_capacity` bytes, and the result is read as a big-endian integer.

    Raises:
        UsageError: If the message is longer than the capacity minus the prefix.
    """
    capacity = message_capacity(n, t)
    limit = capacity - _LENGTH_PREFIX
    assert_condition(
        len(message) <= limit,
        lambda: f"message of {len(message)} bytes exceeds the limit of {max(limit, 0)} bytes",
    )
    payload = len(message).to_bytes(_LENGTH_PREFIX, "little") + message
    payload += bytes(capacity - len(payload))
    return PlaintextInteger(int.from_bytes(payload, "big"))


def unpack_message(m: PlaintextInteger, n: int, t: int) -> bytes:
    """Invert :func:`pack_message`.

    Raises:
        MalformedPayload: If the integer does not encode a length-prefixed message.
    """
    capacity = message_capacity(n, t)
    if capacity < _LENGTH_PREFIX or m.value.bit_length() > 8 * capacity:
        raise MalformedPayload("plaintext does not fit the message capacity")
    payload = m.value.to_bytes(capacity, "big")
    length = int.from_bytes(payload[:_LENGTH_PREFIX], "little")
    end = _LENGTH_PREFIX + length
    if end > capacity:
        raise MalformedPayload(f"length prefix {length} exceeds the message capacity")
    if any(payload[end:]):
        raise MalformedPayload("message padding is not zero")
    return payload[_LENGTH_PREFIX:end]


__all__ = [
    "ErrorVector",
    "PlaintextInteger",
    "binomial",
    "unrank",
    "rank",
    "sample_error",
    "message_capacity",
    "pack_message",
    "unpack_message",
]
