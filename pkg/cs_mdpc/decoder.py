"""Bit-flipping decoders for the private parity-check matrix H = [cir(h_0) | ... ].

:func:`decode` is the constrained-memory decoder: unsatisfied-check counts are
recomputed on the fly for one variable at a time, the flip threshold follows the
largest count seen in the previous pass, and a failed attempt is rewound and retried
with a smaller margin. Apart from the caller-owned syndrome and error vector it keeps
only a handful of scalars.

:func:`reference_bitflip` is the textbook two-pass decoder with a full counter array,
kept as a test oracle.
"""

from collections.abc import Sequence
from dataclasses import dataclass
from enum import StrEnum

import numpy as np

from .cwe import ErrorVector
from .errors import InvariantViolation
from .params import ParameterSet
from .ring_f2 import DenseRingElement, SparseSupport
from .StringLogger import StringLogger, default_logger
from .utils import assert_condition, reduce_index


def hdd_margin(t: int) -> int:
    """Return floor(3t/2), the cap on the provisional error weight.

    Raises:
        UsageError: If ``t`` is below 1.
    """
    assert_condition(t >= 1, lambda: f"t must be at least 1, got {t}")
    return 3 * t // 2


@dataclass(frozen=True, slots=True)
class DecoderConfig:
    """Settings of :func:`decode`.

    Args:
        theta0: Initial threshold, an estimate of the largest unsatisfied-check count.
        delta: Initial threshold margin; a variable flips when its count reaches
            ``theta - delta``.
        iter_bound: Maximum number of passes per attempt.
        hdd_margin: Capacity of the provisional error list.
        index_sign: ``+1`` reads ``s[(j + L[z]) mod r]`` (palindromic keys), ``-1``
            reads ``s[(j - L[z]) mod r]`` (general circulant keys).
    """

    theta0: int
    delta: int
    iter_bound: int
    hdd_margin: int
    index_sign: int = 1

    def __post_init__(self) -> None:
        """Validate the settings."""
        assert_condition(
            0 <= self.delta < self.theta0,
            lambda: f"need 0 <= delta < theta0, got delta={self.delta}, theta0={self.theta0}",
        )
        assert_condition(self.iter_bound >= 1, "iter_bound must be at least 1")
        assert_condition(self.hdd_margin >= 1, "hdd_margin must be at least 1")
        assert_condition(self.index_sign in (1, -1), "index_sign must be +1 or -1")

    @classmethod
    def for_params(
        cls,
        params: ParameterSet,
        theta0: int | None = None,
        delta: int | None = None,
        iter_bound: int | None = None,
    ) -> "DecoderConfig":
        """Derive the settings from a parameter set, with optional overrides.

        The defaults are the set's theta0 and delta, ``iter_bound = t`` and
        ``hdd_margin = floor(3t/2)``.

        Raises:
            UsageError: If the resulting settings are inconsistent with ``params``.
        """
        t = max(params.t, 1)
        config = cls(
            params.theta0 if theta0 is None else theta0,
            params.delta if delta is None else delta,
            t if iter_bound is None else iter_bound,
            hdd_margin(t),
            1 if params.cyclosymmetric else -1,
        )
        assert_condition(
            config.theta0 <= params.d_v,
            lambda: f"theta0 {config.theta0} exceeds d_v {params.d_v}",
        )
        return config


class DecodeStatus(StrEnum):
    """Result of a decoding run."""

    SUCCESS = "success"
    FAILURE = "failure"


@dataclass(frozen=True, slots=True)
class DecodeStats:
    """Counters collected while decoding.

    Args:
        iterations: Passes in the final attempt.
        total_iterations: Passes over all attempts.
        restarts: Number of rewinds (each one lowers delta by one).
        final_delta: Margin in effect during the final attempt.
        peak_weight: Largest provisional error weight reached.
    """

    iterations: int
    total_iterations: int
    restarts: int
    final_delta: int
    peak_weight: int


@dataclass(frozen=True, slots=True)
class DecodeOutcome:
    """What a decoder returns.

    Args:
        status: Success or failure.
        e: Decoded error vector on success, ``None`` on failure.
        stats: Counters of the run.
    """

    status: DecodeStatus
    e: ErrorVector | None
    stats: DecodeStats

    @property
    def success(self) -> bool:
        """Whether decoding succeeded."""
        return self.status is DecodeStatus.SUCCESS


def _column_offsets(blocks: Sequence[SparseSupport], sign: int) -> list[tuple[int, ...]]:
    """Per-block offsets o with row (j + o) mod r for each nonzero of column j."""
    if sign > 0:
        return [block.support for block in blocks]
    return [tuple((-c) % block.r for c in block.support) for block in blocks]


def _check_blocks(blocks: Sequence[SparseSupport]) -> tuple[int, int]:
    assert_condition(len(blocks) >= 1, "need at least one block")
    r = blocks[0].r
    d_v = blocks[0].weight
    assert_condition(
        all(block.r == r and block.weight == d_v for block in blocks),
        "all blocks must share block size and weight",
    )
    return r, d_v


def column_syndrome(
    blocks: Sequence[SparseSupport], coords: Sequence[int], sign: int = 1
) -> bytearray:
    """Return H * e^T (one byte per bit) for the error with the given coordinates.

    Args:
        blocks: Private blocks.
        coords: Coordinates of the error in ``[0, n0 * r)``.
        sign: Index direction, as in :class:`DecoderConfig`.
    """
    r, _ = _check_blocks(blocks)
    offsets = _column_offsets(blocks, sign)
    syndrome = bytearray(r)
    for j in coords:
        b, jj = divmod(j, r)
        for offset in offsets[b]:
            syndrome[reduce_index(jj + offset, r)] ^= 1
    return syndrome


def unsat_counts(
    blocks: Sequence[SparseSupport], syndrome: bytes | bytearray | np.ndarray, sign: int = 1
) -> np.ndarray:
    """Return the number of unsatisfied checks touching every variable.

    Args:
        blocks: Private blocks.
        syndrome: One entry (0 or 1) per row.
        sign: Index direction, as in :class:`DecoderConfig`.

    Returns:
        np.ndarray: Counts of length ``n0 * r``.
    """
    r, _ = _check_blocks(blocks)
    if isinstance(syndrome, np.ndarray):
        s = syndrome.astype(np.uint8, copy=False)
    else:
        s = np.frombuffer(bytes(syndrome), dtype=np.uint8)
    assert_condition(len(s) == r, lambda: f"syndrome must have {r} entries, got {len(s)}")
    counts = np.zeros(len(blocks) * r, dtype=np.int64)
    for b, offsets in enumerate(_column_offsets(blocks, sign)):
        block_counts = counts[b * r : (b + 1) * r]
        for offset in offsets:
            block_counts += np.roll(s, -offset)
    return counts


def _flip_column(syndrome: bytearray, offsets: tuple[int, ...], jj: int, r: int) -> int:
    """Flip the syndrome bits of one column and return the change in syndrome weight."""
    change = 0
    for offset in offsets:
        i = reduce_index(jj + offset, r)
        bit = syndrome[i] ^ 1
        syndrome[i] = bit
        change += 2 * bit - 1
    return change


def _verify_consistency(
    original: bytes,
    syndrome: bytearray,
    blocks: Sequence[SparseSupport],
    e: ErrorVector,
    sign: int,
) -> None:
    recomputed = column_syndrome(blocks, e.coords[: e.ew], sign)
    for i, bit in enumerate(recomputed):
        recomputed[i] = bit ^ syndrome[i]
    if recomputed != original:
        raise InvariantViolation("original syndrome != current syndrome + H * e^T")


def decode(
    blocks: Sequence[SparseSupport],
    s: bytearray | DenseRingElement,
    t: int,
    cfg: DecoderConfig,
    e: ErrorVector | None = None,
    *,
    checked: bool = False,
    logger: StringLogger = default_logger,
) -> DecodeOutcome:
    """Find an error of weight at most ``t`` whose syndrome under H is ``s``.

    The syndrome is updated in place as variables are flipped, so on success it ends
    at zero. A failed attempt with a positive margin is undone by flipping back the
    columns of the provisional error, then retried with the margin lowered by one.

    Args:
        blocks: The n0 private blocks, each of weight d_v.
        s: Syndrome, one byte per bit (mutated in place). A dense element is
            unpacked into a fresh buffer first.
        t: Target error weight.
        cfg: Decoder settings.
        e: Output slots of capacity at least ``cfg.hdd_margin``; allocated when omitted.
        checked: After every pass verify that the original syndrome equals the current
            one plus H * e^T, and after every rewind that the syndrome is restored.
        logger: Receives restart and capacity-break traces.

    Returns:
        DecodeOutcome: Success iff the syndrome reaches zero with at most ``t`` errors.

    Raises:
        UsageError: If the inputs are inconsistent.
        InvariantViolation: In checked mode, if the syndrome bookkeeping is broken.
    """
    r, d_v = _check_blocks(blocks)
    n0 = len(blocks)
    n = n0 * r
    syndrome = s.to_unpacked() if isinstance(s, DenseRingElement) else s
    assert_condition(len(syndrome) == r, lambda: f"syndrome must have {r} entries")
    assert_condition(cfg.theta0 <= d_v, lambda: f"theta0 {cfg.theta0} exceeds d_v {d_v}")
    assert_condition(cfg.hdd_margin >= t, lambda: f"hdd_margin {cfg.hdd_margin} below t={t}")
    cap = cfg.hdd_margin
    if e is None:
        e = ErrorVector.empty(n, cap)
    assert_condition(e.n == n and e.capacity >= cap, "error vector does not fit the code")

    offsets = _column_offsets(blocks, cfg.index_sign)
    original = bytes(syndrome) if checked else b""
    coords = e.coords
    sw = sum(syndrome)
    delta = cfg.delta
    restarts = 0
    total_iterations = 0
    peak = 0

    while True:
        ew = 0
        theta = cfg.theta0
        iterations = 0
        while True:
            newmax = 0
            full = False
            for b in range(n0):
                column = offsets[b]
                base = b * r
                for jj in range(r):
                    unsat = 0
                    for offset in column:
                        i = jj + offset
                        if i >= r:
                            i -= r
                        unsat += syndrome[i]
                    if unsat > newmax:
                        newmax = unsat
                    if unsat < theta - delta:
                        continue
                    j = base + jj
                    q = 0
                    while q < ew and coords[q] != j:
                        q += 1
                    if q < ew:
                        ew -= 1
                        coords[q] = coords[ew]
                    elif ew < cap:
                        coords[ew] = j
                        ew += 1
                        if ew > peak:
                            peak = ew
                    else:
                        logger.log(lambda: f"decode: provisional weight reached {cap}, pass cut")
                        full = True
                        break
                    sw += _flip_column(syndrome, column, jj, r)
                if full:
                    break
            theta = newmax
            iterations += 1
            total_iterations += 1
            if checked:
                e.ew = ew
                _verify_consistency(original, syndrome, blocks, e, cfg.index_sign)
            if sw == 0 or iterations == cfg.iter_bound:
                break

        if (sw != 0 or ew > t) and delta > 0:
            delta -= 1
            restarts += 1
            logger.log(
                lambda: f"decode: attempt failed (weight {sw}, ew {ew}), retry with delta={delta}"
            )
            for q in range(ew):
                b, jj = divmod(coords[q], r)
                sw += _flip_column(syndrome, offsets[b], jj, r)
            if checked and bytes(syndrome) != original:
                raise InvariantViolation("rewind did not restore the original syndrome")
            continue
        break

    e.ew = ew
    stats = DecodeStats(iterations, total_iterations, restarts, delta, peak)
    if sw == 0 and ew <= t:
        return DecodeOutcome(DecodeStatus.SUCCESS, e, stats)
    return DecodeOutcome(DecodeStatus.FAILURE, None, stats)


def reference_bitflip(
    blocks: Sequence[SparseSupport],
    s: bytes | bytearray | DenseRingElement,
    t: int,
    iter_bound: int,
    sign: int = 1,
) -> DecodeOutcome:
    """Textbook bit-flipping decoder with a full counter array.

    Every iteration recomputes the syndrome of the current guess, counts the
    unsatisfied checks of every variable, and flips all variables reaching the
    maximum count.

    Args:
        blocks: The n0 private blocks.
        s: Target syndrome (not modified).
        t: Target error weight.
        iter_bound: Maximum number of flipping rounds.
        sign: Index direction, as in :class:`DecoderConfig`.

    Returns:
        DecodeOutcome: Success iff the residual syndrome is zero with at most ``t`` errors.
    """
    r, _ = _check_blocks(blocks)
    n = len(blocks) * r
    target = np.frombuffer(
        bytes(s.to_unpacked() if isinstance(s, DenseRingElement) else s), dtype=np.uint8
    )
    assert_condition(len(target) == r, lambda: f"syndrome must have {r} entries")
    guess = np.zeros(n, dtype=bool)
    iterations = 0
    peak = 0
    residual = target
    while True:
        residual = target ^ np.frombuffer(
            bytes(column_syndrome(blocks, np.flatnonzero(guess).tolist(), sign)), dtype=np.uint8
        )
        if not residual.any() or iterations == iter_bound:
            break
        counts = unsat_counts(blocks, residual, sign)
        highest = int(counts.max())
        if highest == 0:
            break
        guess ^= counts == highest
        iterations += 1
        peak = max(peak, int(guess.sum()))

    weight = int(guess.sum())
    stats = DecodeStats(iterations, iterations, 0, 0, peak)
    if not residual.any() and weight <= t:
        e = ErrorVector.from_support(n, np.flatnonzero(guess).tolist())
        return DecodeOutcome(DecodeStatus.SUCCESS, e, stats)
    return DecodeOutcome(DecodeStatus.FAILURE, None, stats)


__all__ = [
    "DecoderConfig",
    "DecodeStatus",
    "DecodeStats",
    "DecodeOutcome",
    "hdd_margin",
    "decode",
    "reference_bitflip",
    "column_syndrome",
    "unsat_counts",
]
