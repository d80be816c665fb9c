"""Empirical tuning of the decoder and decoding-failure-rate measurement.

Every random choice comes from a generator seeded by
``SeedSequence(seed, spawn_key=(stream, index))``, so a trial's outcome depends only
on the master seed and its index, never on how trials are scheduled across workers.
"""

import csv
import time
from collections.abc import Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from enum import IntEnum
from typing import Any, TextIO

import numpy as np

from .cwe import ErrorVector, sample_error
from .cyclosym import sample_cyclosymmetric_error
from .decoder import DecoderConfig, column_syndrome, decode, unsat_counts
from .kem import PrivateKey, encrypt, keygen, private_syndrome, sample_block, try_decrypt
from .params import ParameterSet
from .utils import assert_condition

DEFAULT_KEYS_EVERY = 100


class _Stream(IntEnum):
    KEYS = 0
    TRIALS = 1


def trial_rng(seed: int, stream: int, index: int) -> np.random.Generator:
    """Return the generator of one trial (or key batch)."""
    sequence = np.random.SeedSequence(seed, spawn_key=(int(stream), int(index)))
    return np.random.default_rng(sequence)


def _sample_coords(
    params: ParameterSet, rng: np.random.Generator, cyclosymmetric_errors: bool
) -> tuple[int, ...]:
    if cyclosymmetric_errors:
        return sample_cyclosymmetric_error(params.shape, params.n0, params.t, rng)
    return sample_error(params.n, params.t, rng).support()


@dataclass(frozen=True, slots=True)
class ThetaEstimate:
    """Statistics of the largest initial unsatisfied-check count.

    Args:
        params_id: Parameter set the samples were drawn for.
        samples: Number of (code, error) pairs.
        mean: Mean of the per-sample maxima.
        stddev: Population standard deviation of the maxima.
        theta0: ``mean`` rounded to the nearest integer.
    """

    params_id: str
    samples: int
    mean: float
    stddev: float
    theta0: int


def estimate_theta0(
    params: ParameterSet,
    num_codes: int,
    num_errors_per_code: int,
    rng: np.random.Generator,
    *,
    cyclosymmetric_errors: bool = False,
) -> ThetaEstimate:
    """Estimate theta0 from random codes and random weight-t errors.

    For every sample the syndrome s = H * e^T is formed and the maximum over all
    variables of the number of unsatisfied checks is recorded. Only the private code
    is needed, so no key inversion takes place.

    Raises:
        UsageError: If a count is below 1.
    """
    assert_condition(num_codes >= 1 and num_errors_per_code >= 1, "counts must be at least 1")
    sign = 1 if params.cyclosymmetric else -1
    maxima = np.empty(num_codes * num_errors_per_code, dtype=np.int64)
    for code in range(num_codes):
        blocks = [sample_block(params, rng) for _ in range(params.n0)]
        for error in range(num_errors_per_code):
            coords = _sample_coords(params, rng, cyclosymmetric_errors)
            syndrome = column_syndrome(blocks, coords, sign)
            maxima[code * num_errors_per_code + error] = unsat_counts(blocks, syndrome, sign).max()
    mean = float(maxima.mean())
    return ThetaEstimate(params.id, len(maxima), mean, float(maxima.std()), round(mean))


@dataclass(frozen=True, slots=True)
class TrialRecord:
    """One encrypt/decrypt round trip.

    Args:
        params_id: Parameter set identifier.
        seed: Master seed.
        trial: Trial index.
        outcome: ``ok`` or the failure kind.
        iterations: Decoder passes over all attempts.
        restarts: Decoder rewinds.
        peak_weight: Largest provisional error weight.
        micros: Decryption wall time in microseconds (not part of equality).
    """

    params_id: str
    seed: int
    trial: int
    outcome: str
    iterations: int
    restarts: int
    peak_weight: int
    micros: int = field(compare=False)


@dataclass(frozen=True, slots=True)
class TrialReport:
    """Aggregate of a failure-rate measurement.

    Args:
        params: Parameter set.
        seed: Master seed.
        trials: Number of round trips.
        successes: Round trips that recovered the encrypted error exactly.
        theta0_mean: Mean largest initial unsatisfied-check count.
        theta0_stddev: Its standard deviation.
        iteration_histogram: Entry i counts trials that used i decoder passes.
        records: Per-trial records.
        total_micros: Sum of decryption times (not part of equality).
    """

    params: ParameterSet
    seed: int
    trials: int
    successes: int
    theta0_mean: float
    theta0_stddev: float
    iteration_histogram: tuple[int, ...]
    records: tuple[TrialRecord, ...]
    total_micros: int = field(compare=False)

    @property
    def failures(self) -> int:
        """Trials that did not recover the error."""
        return self.trials - self.successes

    @property
    def dfr(self) -> float:
        """Decoding failure rate, failures / trials."""
        return self.failures / self.trials

    def summary(self) -> str:
        """Return a human-readable summary."""
        mean_micros = self.total_micros / self.trials
        lines = [
            f"params      {self.params.id} ({self.params.mode}, r={self.params.r})",
            f"seed        {self.seed}",
            f"trials      {self.trials}",
            f"failures    {self.failures}",
            f"dfr         {self.dfr:.6f}",
            f"theta0      {self.theta0_mean:.2f} +- {self.theta0_stddev:.2f}",
            f"iterations  {dict(enumerate(self.iteration_histogram))}",
            f"decrypt     {mean_micros:.0f} us on average",
        ]
        return "\n".join(lines)


def _round_trip(
    params: ParameterSet,
    sk: PrivateKey,
    seed: int,
    trial: int,
    cfg: DecoderConfig,
    cyclosymmetric_errors: bool,
) -> tuple[TrialRecord, int]:
    rng = trial_rng(seed, _Stream.TRIALS, trial)
    coords = _sample_coords(params, rng, cyclosymmetric_errors)
    e = ErrorVector.from_support(params.n, coords)
    c = encrypt(sk.public_key, e)
    initial = private_syndrome(sk, c).to_unpacked()
    initial_max = int(unsat_counts(sk.blocks, initial, cfg.index_sign).max())
    start = time.perf_counter_ns()
    report = try_decrypt(sk, c, cfg)
    micros = (time.perf_counter_ns() - start) // 1000
    outcome = report.status.value
    if report.ok and report.e != e:
        outcome = "miscorrection"
    stats = report.outcome.stats
    record = TrialRecord(
        params.id,
        seed,
        trial,
        outcome,
        stats.total_iterations,
        stats.restarts,
        stats.peak_weight,
        micros,
    )
    return record, initial_max


def _run_batch(
    params: ParameterSet,
    seed: int,
    batch: int,
    trials: range,
    cfg: DecoderConfig,
    cyclosymmetric_errors: bool,
) -> list[tuple[TrialRecord, int]]:
    _, sk = keygen(params, trial_rng(seed, _Stream.KEYS, batch))
    return [_round_trip(params, sk, seed, trial, cfg, cyclosymmetric_errors) for trial in trials]


def _batches(trials: int, keys_every: int) -> list[tuple[int, range]]:
    return [
        (batch, range(start, min(start + keys_every, trials)))
        for batch, start in enumerate(range(0, trials, keys_every))
    ]


def measure_dfr(
    params: ParameterSet,
    trials: int,
    seed: int,
    *,
    keys_every: int = DEFAULT_KEYS_EVERY,
    jobs: int = 1,
    cfg: DecoderConfig | None = None,
    cyclosymmetric_errors: bool = False,
) -> TrialReport:
    """Measure the decoding failure rate with full keygen/encrypt/decrypt round trips.

    A fresh key pair is generated every ``keys_every`` trials. The report is identical
    for identical inputs, whatever ``jobs`` is.

    Args:
        params: Parameter set.
        trials: Number of round trips.
        seed: Master seed.
        keys_every: Trials per key pair.
        jobs: Worker processes; key batches are distributed across them.
        cfg: Decoder settings; derived from ``params`` when omitted.
        cyclosymmetric_errors: Draw orbit-closed errors instead of uniform ones.

    Raises:
        UsageError: If a count is below 1.
    """
    assert_condition(trials >= 1, "trials must be at least 1")
    assert_condition(keys_every >= 1 and jobs >= 1, "keys_every and jobs must be at least 1")
    cfg = cfg or DecoderConfig.for_params(params)
    batches = _batches(trials, keys_every)
    if jobs == 1:
        results = [
            _run_batch(params, seed, batch, span, cfg, cyclosymmetric_errors)
            for batch, span in batches
        ]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [
                pool.submit(_run_batch, params, seed, batch, span, cfg, cyclosymmetric_errors)
                for batch, span in batches
            ]
            results = [future.result() for future in futures]

    pairs = [pair for batch_result in results for pair in batch_result]
    records = tuple(record for record, _ in pairs)
    maxima = np.array([initial_max for _, initial_max in pairs], dtype=np.int64)
    iterations = np.array([record.iterations for record in records], dtype=np.int64)
    return TrialReport(
        params,
        seed,
        trials,
        sum(record.outcome == "ok" for record in records),
        float(maxima.mean()),
        float(maxima.std()),
        tuple(np.bincount(iterations).tolist()),
        records,
        sum(record.micros for record in records),
    )


@dataclass(frozen=True, slots=True)
class DeltaRow:
    """Performance of one threshold margin.

    Args:
        delta: Initial margin.
        trials: Number of decodings.
        failures: Failed decodings.
        dfr: failures / trials.
        mean_iterations: Mean decoder passes over all attempts.
        mean_micros: Mean decoding time (not part of equality).
    """

    delta: int
    trials: int
    failures: int
    dfr: float
    mean_iterations: float
    mean_micros: float = field(compare=False)


def tune_delta(
    params: ParameterSet,
    candidate_deltas: Sequence[int],
    trials_per_delta: int,
    seed: int,
    *,
    keys_every: int = DEFAULT_KEYS_EVERY,
    cyclosymmetric_errors: bool = False,
) -> list[DeltaRow]:
    """Evaluate every margin on the same keys and errors.

    Args:
        params: Parameter set; its theta0 stays fixed.
        candidate_deltas: Margins to try, each below theta0.
        trials_per_delta: Decodings per margin.
        seed: Master seed; trial i uses the same key and error for every margin.
        keys_every: Trials per key pair.
        cyclosymmetric_errors: Draw orbit-closed errors instead of uniform ones.

    Raises:
        UsageError: If a count is below 1 or a margin is not below theta0.
    """
    assert_condition(trials_per_delta >= 1, "trials must be at least 1")
    configs = [DecoderConfig.for_params(params, delta=delta) for delta in candidate_deltas]
    failures = [0] * len(configs)
    iterations = [0] * len(configs)
    micros = [0] * len(configs)
    for batch, span in _batches(trials_per_delta, keys_every):
        _, sk = keygen(params, trial_rng(seed, _Stream.KEYS, batch))
        for trial in span:
            rng = trial_rng(seed, _Stream.TRIALS, trial)
            coords = _sample_coords(params, rng, cyclosymmetric_errors)
            c = encrypt(sk.public_key, ErrorVector.from_support(params.n, coords))
            syndrome = private_syndrome(sk, c).to_unpacked()
            for index, cfg in enumerate(configs):
                start = time.perf_counter_ns()
                outcome = decode(sk.blocks, bytearray(syndrome), params.t, cfg)
                micros[index] += (time.perf_counter_ns() - start) // 1000
                iterations[index] += outcome.stats.total_iterations
                if not outcome.success or outcome.e is None or outcome.e.support() != coords:
                    failures[index] += 1
    return [
        DeltaRow(
            cfg.delta,
            trials_per_delta,
            failures[index],
            failures[index] / trials_per_delta,
            iterations[index] / trials_per_delta,
            micros[index] / trials_per_delta,
        )
        for index, cfg in enumerate(configs)
    ]


def fastest_delta(rows: Iterable[DeltaRow], dfr_bound: float) -> DeltaRow | None:
    """Return the row with the fewest mean passes among those with ``dfr <= dfr_bound``.

    Passes are the deterministic measure of decoding work; ties go to the larger
    margin.
    """
    eligible = [row for row in rows if row.dfr <= dfr_bound]
    if not eligible:
        return None
    return min(eligible, key=lambda row: (row.mean_iterations, -row.delta))


def write_csv(rows: Iterable[Any], stream: TextIO, row_type: type) -> None:
    """Write dataclass rows as CSV, one column per field of ``row_type``."""
    writer = csv.DictWriter(
        stream, fieldnames=[f.name for f in fields(row_type)], lineterminator="\n"
    )
    writer.writeheader()
    for row in rows:
        writer.writerow(asdict(row))


__all__ = [
    "DEFAULT_KEYS_EVERY",
    "trial_rng",
    "ThetaEstimate",
    "estimate_theta0",
    "TrialRecord",
    "TrialReport",
    "measure_dfr",
    "DeltaRow",
    "tune_delta",
    "fastest_delta",
    "write_csv",
]
