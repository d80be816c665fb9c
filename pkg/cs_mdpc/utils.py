"""Shared helper utilities used across modules."""

from collections.abc import Callable, MutableMapping
from typing import TypeVar

from .errors import UsageError

K = TypeVar("K")
V = TypeVar("V")


def assert_condition(condition: bool, message: str | Callable[[], str]) -> None:
    """Raise :class:`UsageError` when the condition fails.

    Args:
        condition: Predicate that must evaluate to ``True``.
        message: Error text or a thunk returning the final message.

    Raises:
        UsageError: Raised when ``condition`` is ``False``, using the provided message.
    """
    if not condition:
        detail = message() if callable(message) else message
        raise UsageError(detail)


def insert_into(map_obj: MutableMapping[K, list[V]], key: K, value: V) -> None:
    """Append a single value to the list stored under ``key``.

    Args:
        map_obj: Mapping whose values are mutable lists.
        key: Target key to create or extend.
        value: Element appended to the end of the stored list.
    """
    map_obj.setdefault(key, []).append(value)


def reduce_index(index: int, modulus: int) -> int:
    """Reduce an index known to lie in ``[-modulus, 2 * modulus)`` by one correction.

    Args:
        index: Sum or difference of two values that are each below ``modulus``.
        modulus: Block size.

    Returns:
        int: ``index mod modulus``.
    """
    if index >= modulus:
        return index - modulus
    if index < 0:
        return index + modulus
    return index


def reverse_bits(value: int, width: int) -> int:
    """Mirror the low ``width`` bits of ``value`` (bit i moves to ``width - 1 - i``)."""
    if width <= 0:
        return 0
    return int(format(value, f"0{width}b")[::-1], 2)


def byte_length(bits: int) -> int:
    """Return the number of bytes needed to hold ``bits`` bits."""
    return (bits + 7) // 8


__all__ = ["assert_condition", "insert_into", "reduce_index", "reverse_bits", "byte_length"]
