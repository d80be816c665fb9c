"""Encode and decode key and cryptogram files.

Layout: 8-byte magic ``CSMDPC\\x00\\x01`` (the last two bytes are the version),
a kind byte (1 public key, 2 private key, 3 cryptogram; bit 7 set for QC mode),
the parameter block ``n0, L, p_1..p_L`` as u32 and ``d_v, t, theta0, delta`` as u16,
then the payload. All integers are little-endian and all pad bits are zero.
"""

import struct
from enum import IntEnum
from typing import Final

from .cyclosym import CompressedBlock, LayerShape, compress, expand
from .errors import (
    BadMagic,
    CoordinateOutOfRange,
    MalformedPayload,
    TrailingData,
    Truncated,
    UnsupportedVersion,
    UsageError,
    WrongKind,
)
from .kem import Cryptogram, PrivateKey, PublicKey
from .params import ParameterSet, match_preset
from .ring_f2 import DenseRingElement, SparseSupport
from .utils import byte_length

MAGIC: Final = b"CSMDPC\x00\x01"
_MAGIC_PREFIX: Final = MAGIC[:6]
_QC_FLAG: Final = 0x80


class Kind(IntEnum):
    """Object stored in a file."""

    PUBLIC_KEY = 1
    PRIVATE_KEY = 2
    CRYPTOGRAM = 3


def _encode_header(kind: Kind, params: ParameterSet) -> bytes:
    flag = 0 if params.cyclosymmetric else _QC_FLAG
    factors = params.shape.factors
    return b"".join(
        [
            MAGIC,
            bytes([kind | flag]),
            struct.pack(f"<II{len(factors)}I", params.n0, len(factors), *factors),
            struct.pack("<4H", params.d_v, params.t, params.theta0, params.delta),
        ]
    )


class _Reader:
    """Cursor over a byte string that refuses to read past its end."""

    def __init__(self, data: bytes) -> None:
        """Start at offset 0."""
        self._data = data
        self._offset = 0

    def take(self, size: int) -> bytes:
        """Return the next ``size`` bytes.

        Raises:
            Truncated: If fewer bytes remain.
        """
        end = self._offset + size
        if end > len(self._data):
            raise Truncated(f"need {end} bytes, file has {len(self._data)}")
        chunk = self._data[self._offset : end]
        self._offset = end
        return chunk

    def unpack(self, fmt: str) -> tuple[int, ...]:
        """Read and unpack a ``struct`` format."""
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))

    def finish(self) -> None:
        """Raise :class:`TrailingData` if bytes remain."""
        if self._offset != len(self._data):
            raise TrailingData(f"{len(self._data) - self._offset} unexpected trailing bytes")


def peek_kind(data: bytes) -> tuple[Kind, bool]:
    """Return the kind of a file and whether it is in QC mode.

    Raises:
        BadMagic: If the file does not start with the magic.
        UnsupportedVersion: If the version is not supported.
        WrongKind: If the kind byte is unknown.
        Truncated: If the file ends inside the magic or kind byte.
    """
    head = data[: len(_MAGIC_PREFIX)]
    if head != _MAGIC_PREFIX[: len(head)]:
        raise BadMagic("not a cs-mdpc file")
    reader = _Reader(data)
    magic = reader.take(len(MAGIC))
    if magic != MAGIC:
        raise UnsupportedVersion(f"unsupported format version {magic[6:].hex()}")
    (kind_byte,) = reader.take(1)
    try:
        kind = Kind(kind_byte & ~_QC_FLAG)
    except ValueError as error:
        raise WrongKind(f"unknown kind byte {kind_byte:#04x}") from error
    return kind, bool(kind_byte & _QC_FLAG)


def _decode_header(reader: _Reader, data: bytes, expected: Kind) -> ParameterSet:
    kind, qc = peek_kind(data)
    if kind is not expected:
        raise WrongKind(f"expected {expected.name.lower()}, found {kind.name.lower()}")
    reader.take(len(MAGIC) + 1)
    n0, layers = reader.unpack("<II")
    if layers not in (1, 2):
        raise MalformedPayload(f"layer count must be 1 or 2, got {layers}")
    factors = reader.unpack(f"<{layers}I")
    d_v, t, theta0, delta = reader.unpack("<4H")
    try:
        return match_preset(
            n0, LayerShape(tuple(factors)), d_v, t, theta0, delta, cyclosymmetric=not qc
        )
    except UsageError as error:
        raise MalformedPayload(f"invalid parameter block: {error}") from error


def serialize_pk(pk: PublicKey) -> bytes:
    """Encode a public key: compressed blocks in CS mode, dense blocks in QC mode."""
    params = pk.params
    if params.cyclosymmetric:
        payload = [compress(block, params.shape).to_bytes() for block in pk.blocks]
    else:
        payload = [block.to_bytes() for block in pk.blocks]
    return _encode_header(Kind.PUBLIC_KEY, params) + b"".join(payload)


def deserialize_pk(data: bytes) -> PublicKey:
    """Decode :func:`serialize_pk` output.

    Raises:
        FormatError: If the file is malformed.
    """
    reader = _Reader(data)
    params = _decode_header(reader, data, Kind.PUBLIC_KEY)
    blocks = []
    for _ in range(params.n0 - 1):
        if params.cyclosymmetric:
            raw = reader.take(byte_length(params.shape.compressed_length))
            blocks.append(expand(CompressedBlock.from_bytes(params.shape, raw)))
        else:
            raw = reader.take(byte_length(params.r))
            blocks.append(DenseRingElement.from_bytes(params.r, raw))
    reader.finish()
    return PublicKey(params, tuple(blocks))


def serialize_sk(sk: PrivateKey) -> bytes:
    """Encode a private key as ``n0 * d_v`` u32 coordinates."""
    params = sk.params
    coords = [c for block in sk.blocks for c in block.support]
    return _encode_header(Kind.PRIVATE_KEY, params) + struct.pack(f"<{len(coords)}I", *coords)


def deserialize_sk(data: bytes) -> PrivateKey:
    """Decode :func:`serialize_sk` output.

    Raises:
        FormatError: If the file is malformed.
    """
    reader = _Reader(data)
    params = _decode_header(reader, data, Kind.PRIVATE_KEY)
    blocks = []
    for _ in range(params.n0):
        coords = reader.unpack(f"<{params.d_v}I")
        if any(c >= params.r for c in coords):
            raise CoordinateOutOfRange(f"coordinate {max(coords)} outside [0, {params.r})")
        if any(a >= b for a, b in zip(coords, coords[1:], strict=False)):
            raise MalformedPayload("private key coordinates must be strictly increasing")
        blocks.append(SparseSupport(params.r, tuple(coords)))
    reader.finish()
    try:
        return PrivateKey(params, tuple(blocks))
    except UsageError as error:
        raise MalformedPayload(f"invalid private key: {error}") from error


def serialize_ct(c: Cryptogram) -> bytes:
    """Encode a cryptogram as ceil(r/8) bytes after the header."""
    return _encode_header(Kind.CRYPTOGRAM, c.params) + c.syndrome.to_bytes()


def deserialize_ct(data: bytes) -> Cryptogram:
    """Decode :func:`serialize_ct` output.

    Raises:
        FormatError: If the file is malformed.
    """
    reader = _Reader(data)
    params = _decode_header(reader, data, Kind.CRYPTOGRAM)
    syndrome = DenseRingElement.from_bytes(params.r, reader.take(byte_length(params.r)))
    reader.finish()
    return Cryptogram(params, syndrome)


__all__ = [
    "MAGIC",
    "Kind",
    "peek_kind",
    "serialize_pk",
    "deserialize_pk",
    "serialize_sk",
    "deserialize_sk",
    "serialize_ct",
    "deserialize_ct",
]
