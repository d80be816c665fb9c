"""Niederreiter encryption over CS-MDPC and plain QC-MDPC codes.

The private key is H = [cir(h_0) | ... | cir(h_{n0-1})] with sparse blocks; the
public key is the systematic form [cir(K_0) | ... | cir(K_{n0-2}) | I] with
K_i = h_{n0-1}^-1 * h_i. A cryptogram is the syndrome c = H_pub * e^T of a weight-t
error e.

Column j of cir(a) is x^j * a(x^-1), so the public columns are rotations of the
transposed K_i and the private syndrome is transpose(h_{n0-1}) * c. For palindromic
(cyclosymmetric) blocks the transpose is the identity.
"""

from collections.abc import Iterable
from dataclasses import dataclass
from enum import StrEnum
from functools import cached_property
from typing import Final

import numpy as np

from .cwe import ErrorVector, pack_message, rank, unpack_message, unrank
from .cyclosym import is_cyclosymmetric, sample_sparse_cyclosymmetric
from .decoder import DecodeOutcome, DecoderConfig, decode
from .errors import (
    DecodingFailure,
    KeygenFailure,
    NotInvertible,
    VerificationFailure,
    WeightMismatch,
)
from .params import ParameterSet
from .ring_f2 import (
    DenseRingElement,
    SparseSupport,
    invert,
    mul_dense_sparse,
    rotate,
    transpose,
)
from .StringLogger import StringLogger, default_logger
from .utils import assert_condition

KEYGEN_RETRIES: Final = 100


@dataclass(frozen=True)
class PublicKey:
    """The dense blocks K_0, ..., K_{n0-2} of the systematic public matrix.

    Args:
        params: Parameter set.
        blocks: ``n0 - 1`` dense blocks; cyclosymmetric in CS mode.
    """

    params: ParameterSet
    blocks: tuple[DenseRingElement, ...]

    def __post_init__(self) -> None:
        """Check the block count, block sizes and, in CS mode, the orbit closure."""
        params = self.params
        assert_condition(
            len(self.blocks) == params.n0 - 1,
            lambda: f"expected {params.n0 - 1} public blocks, got {len(self.blocks)}",
        )
        assert_condition(
            all(block.r == params.r for block in self.blocks), "public block size mismatch"
        )
        if params.cyclosymmetric:
            assert_condition(
                all(is_cyclosymmetric(block, params.shape) for block in self.blocks),
                "public blocks of a CS-MDPC key must be cyclosymmetric",
            )

    @cached_property
    def columns(self) -> tuple[DenseRingElement, ...]:
        """Column 0 of every cir(K_i), i.e. K_i(x^-1)."""
        if self.params.cyclosymmetric:
            return self.blocks
        return tuple(transpose(block) for block in self.blocks)


@dataclass(frozen=True)
class PrivateKey:
    """The sparse blocks h_0, ..., h_{n0-1} of the private parity-check matrix.

    Args:
        params: Parameter set.
        blocks: ``n0`` supports of weight d_v; cyclosymmetric in CS mode.
    """

    params: ParameterSet
    blocks: tuple[SparseSupport, ...]

    def __post_init__(self) -> None:
        """Check the block count, weights and, in CS mode, the orbit closure."""
        params = self.params
        assert_condition(
            len(self.blocks) == params.n0,
            lambda: f"expected {params.n0} private blocks, got {len(self.blocks)}",
        )
        assert_condition(
            all(block.r == params.r and block.weight == params.d_v for block in self.blocks),
            lambda: f"private blocks must have size {params.r} and weight {params.d_v}",
        )
        if params.cyclosymmetric:
            assert_condition(
                all(is_cyclosymmetric(block, params.shape) for block in self.blocks),
                "private blocks of a CS-MDPC key must be cyclosymmetric",
            )

    @cached_property
    def public_key(self) -> PublicKey:
        """Derive K_i = h_{n0-1}^-1 * h_i.

        Raises:
            NotInvertible: If h_{n0-1} is not invertible.
        """
        inverse = invert(self.blocks[-1].densify())
        return PublicKey(
            self.params, tuple(mul_dense_sparse(inverse, h) for h in self.blocks[:-1])
        )


@dataclass(frozen=True, slots=True)
class Cryptogram:
    """An r-bit syndrome.

    Args:
        params: Parameter set the cryptogram was produced under.
        syndrome: The syndrome c = H_pub * e^T.
    """

    params: ParameterSet
    syndrome: DenseRingElement

    def __post_init__(self) -> None:
        """Check the cryptogram length."""
        assert_condition(
            self.syndrome.r == self.params.r,
            lambda: f"cryptogram must have {self.params.r} bits, got {self.syndrome.r}",
        )


def sample_block(params: ParameterSet, rng: np.random.Generator) -> SparseSupport:
    """Draw one private block of weight d_v, cyclosymmetric in CS mode."""
    if params.cyclosymmetric:
        return sample_sparse_cyclosymmetric(params.shape, params.d_v, rng)
    return SparseSupport.from_coords(
        params.r, rng.choice(params.r, size=params.d_v, replace=False).tolist()
    )


def keygen(
    params: ParameterSet,
    rng: np.random.Generator,
    *,
    logger: StringLogger = default_logger,
) -> tuple[PublicKey, PrivateKey]:
    """Generate a key pair.

    Samples ``n0`` blocks of weight d_v (cyclosymmetric in CS mode) and resamples the
    last one until it is invertible.

    Raises:
        KeygenFailure: If no invertible last block turns up within the retry limit.
        UsageError: If d_v cannot be reached by a union of orbits.
    """
    blocks = [sample_block(params, rng) for _ in range(params.n0)]
    for attempt in range(KEYGEN_RETRIES + 1):
        sk = PrivateKey(params, tuple(blocks))
        try:
            return sk.public_key, sk
        except NotInvertible:
            if attempt == KEYGEN_RETRIES:
                break
            logger.log(lambda: f"keygen: last block not invertible, resample #{attempt + 1}")
            blocks[-1] = sample_block(params, rng)
    raise KeygenFailure(f"no invertible block found after {KEYGEN_RETRIES} resamples")


def public_syndrome(pk: PublicKey, coords: Iterable[int]) -> DenseRingElement:
    """Return H_pub * e^T for the error with the given coordinates (no weight check).

    Raises:
        UsageError: If a coordinate is outside ``[0, n)``.
    """
    params = pk.params
    r = params.r
    last = params.n0 - 1
    columns = pk.columns
    accumulator = 0
    for j in coords:
        assert_condition(0 <= j < params.n, lambda: f"coordinate {j} outside [0, {params.n})")
        b, jj = divmod(j, r)
        if b < last:
            accumulator ^= rotate(columns[b], jj).bits
        else:
            accumulator ^= 1 << jj
    return DenseRingElement(r, accumulator)


def encrypt(pk: PublicKey, e: ErrorVector) -> Cryptogram:
    """Return the cryptogram of an error vector of weight exactly t.

    Raises:
        UsageError: If ``e`` has the wrong length or weight.
    """
    params = pk.params
    assert_condition(e.n == params.n, lambda: f"error length must be {params.n}, got {e.n}")
    assert_condition(
        e.weight == params.t, lambda: f"error weight must be {params.t}, got {e.weight}"
    )
    return Cryptogram(params, public_syndrome(pk, e.support()))


def private_syndrome(sk: PrivateKey, c: Cryptogram) -> DenseRingElement:
    """Return H * e^T, computed as transpose(h_{n0-1}) * c.

    Raises:
        UsageError: If the cryptogram length does not match the key.
    """
    assert_condition(c.syndrome.r == sk.params.r, "cryptogram does not match the key size")
    h_last = sk.blocks[-1]
    if not sk.params.cyclosymmetric:
        h_last = h_last.transpose()
    return mul_dense_sparse(c.syndrome, h_last)


class DecryptStatus(StrEnum):
    """Result of :func:`try_decrypt`."""

    OK = "ok"
    DECODING_FAILURE = "decoding-failure"
    WEIGHT_MISMATCH = "weight-mismatch"
    VERIFICATION_FAILURE = "verification-failure"


@dataclass(frozen=True, slots=True)
class DecryptReport:
    """Decryption result without exceptions.

    Args:
        status: What happened.
        e: The decoded error vector, or ``None`` when decoding failed.
        outcome: The decoder's outcome.
    """

    status: DecryptStatus
    e: ErrorVector | None
    outcome: DecodeOutcome

    @property
    def ok(self) -> bool:
        """Whether decryption succeeded."""
        return self.status is DecryptStatus.OK


def try_decrypt(
    sk: PrivateKey,
    c: Cryptogram,
    cfg: DecoderConfig | None = None,
    *,
    checked: bool = False,
    logger: StringLogger = default_logger,
) -> DecryptReport:
    """Decode a cryptogram and verify the result, reporting instead of raising.

    Args:
        sk: Private key.
        c: Cryptogram.
        cfg: Decoder settings; derived from ``sk.params`` when omitted.
        checked: Run the decoder in checked mode.
        logger: Receives decryption and decoder traces.
    """
    params = sk.params
    cfg = cfg or DecoderConfig.for_params(params)
    syndrome = private_syndrome(sk, c).to_unpacked()
    e = ErrorVector.empty(params.n, cfg.hdd_margin)
    outcome = decode(sk.blocks, syndrome, params.t, cfg, e, checked=checked, logger=logger)
    if not outcome.success:
        logger.log(lambda: f"decrypt: decoding failed after {outcome.stats.restarts} restarts")
        return DecryptReport(DecryptStatus.DECODING_FAILURE, None, outcome)
    if e.weight != params.t:
        logger.log(lambda: f"decrypt: decoded weight {e.weight} != t = {params.t}")
        return DecryptReport(DecryptStatus.WEIGHT_MISMATCH, e, outcome)
    if public_syndrome(sk.public_key, e.support()) != c.syndrome:
        logger.log("decrypt: re-encryption does not reproduce the cryptogram")
        return DecryptReport(DecryptStatus.VERIFICATION_FAILURE, e, outcome)
    return DecryptReport(DecryptStatus.OK, e, outcome)


def decrypt(
    sk: PrivateKey,
    c: Cryptogram,
    cfg: DecoderConfig | None = None,
    *,
    logger: StringLogger = default_logger,
) -> ErrorVector:
    """Recover the error vector of a cryptogram.

    Raises:
        DecodingFailure: If the decoder fails.
        WeightMismatch: If the decoded weight is not t.
        VerificationFailure: If re-encryption does not give back ``c``.
    """
    report = try_decrypt(sk, c, cfg, logger=logger)
    match report.status:
        case DecryptStatus.DECODING_FAILURE:
            raise DecodingFailure("decoder did not converge", report.outcome)
        case DecryptStatus.WEIGHT_MISMATCH:
            assert report.e is not None
            raise WeightMismatch(f"decoded weight {report.e.weight} != {sk.params.t}")
        case DecryptStatus.VERIFICATION_FAILURE:
            raise VerificationFailure("decoded error does not re-encrypt to the cryptogram")
    assert report.e is not None
    return report.e


def encrypt_message(pk: PublicKey, message: bytes) -> Cryptogram:
    """Encode ``message`` as a weight-t error and encrypt it.

    Raises:
        UsageError: If the message exceeds the parameter set's capacity.
    """
    params = pk.params
    e = unrank(pack_message(message, params.n, params.t), params.n, params.t)
    return encrypt(pk, e)


def decrypt_message(
    sk: PrivateKey,
    c: Cryptogram,
    cfg: DecoderConfig | None = None,
    *,
    logger: StringLogger = default_logger,
) -> bytes:
    """Decrypt ``c`` and decode the message carried by the error vector.

    Raises:
        CryptoFailure: If decryption fails.
        MalformedPayload: If the recovered integer is not a packed message.
    """
    params = sk.params
    e = decrypt(sk, c, cfg, logger=logger)
    return unpack_message(rank(e, params.t), params.n, params.t)


__all__ = [
    "KEYGEN_RETRIES",
    "PublicKey",
    "PrivateKey",
    "Cryptogram",
    "DecryptStatus",
    "DecryptReport",
    "sample_block",
    "keygen",
    "public_syndrome",
    "encrypt",
    "private_syndrome",
    "try_decrypt",
    "decrypt",
    "encrypt_message",
    "decrypt_message",
]
