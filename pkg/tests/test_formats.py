"""Tests for the key and cryptogram file formats."""

import struct

import numpy as np
import pytest

from cs_mdpc.cwe import sample_error
from cs_mdpc.errors import (
    BadMagic,
    CoordinateOutOfRange,
    MalformedPayload,
    NonzeroPadding,
    TrailingData,
    Truncated,
    UnsupportedVersion,
    WrongKind,
)
from cs_mdpc.formats import (
    MAGIC,
    Kind,
    deserialize_ct,
    deserialize_pk,
    deserialize_sk,
    peek_kind,
    serialize_ct,
    serialize_pk,
    serialize_sk,
)
from cs_mdpc.kem import PublicKey, encrypt, keygen
from cs_mdpc.params import PRESETS, ParameterSet
from cs_mdpc.ring_f2 import DenseRingElement

# magic, kind byte, n0 and L as u32, one u32 layer size, four u16 decoder values
ONE_LAYER_HEADER = 8 + 1 + 8 + 4 + 8


@pytest.mark.parametrize("mode", ["CS", "QC"])
def test_round_trips(mode: str, small_params: ParameterSet, rng: np.random.Generator) -> None:
    """Keys and cryptograms survive serialization."""
    params = small_params if mode == "CS" else small_params.as_qc()
    pk, sk = keygen(params, rng)
    c = encrypt(pk, sample_error(params.n, params.t, rng))

    pk_data = serialize_pk(pk)
    sk_data = serialize_sk(sk)
    ct_data = serialize_ct(c)
    assert peek_kind(pk_data) == (Kind.PUBLIC_KEY, mode == "QC")
    assert peek_kind(sk_data) == (Kind.PRIVATE_KEY, mode == "QC")
    assert peek_kind(ct_data) == (Kind.CRYPTOGRAM, mode == "QC")

    assert deserialize_pk(pk_data).blocks == pk.blocks
    assert deserialize_sk(sk_data).blocks == sk.blocks
    assert deserialize_ct(ct_data).syndrome == c.syndrome
    assert deserialize_sk(sk_data).params.id == "custom"
    assert deserialize_sk(sk_data).params.cyclosymmetric == (mode == "CS")


def test_header_layout(small_params: ParameterSet, rng: np.random.Generator) -> None:
    """The header is magic, kind, parameter block; integers are little-endian."""
    _, sk = keygen(small_params, rng)
    data = serialize_sk(sk)
    assert data[:8] == MAGIC
    assert data[8] == Kind.PRIVATE_KEY
    assert struct.unpack_from("<III4H", data, 9) == (2, 1, 211, 11, 4, 10, 1)
    assert len(data) == ONE_LAYER_HEADER + 4 * 2 * 11
    assert serialize_sk(keygen(small_params.as_qc(), rng)[1])[8] == 0x82


@pytest.mark.parametrize("preset_id", sorted(PRESETS))
def test_public_key_payload_sizes(preset_id: str) -> None:
    """The payload holds exactly pk_bits bits, rounded up to bytes."""
    params = PRESETS[preset_id]
    pk = PublicKey(params, tuple(DenseRingElement.zero(params.r) for _ in range(params.n0 - 1)))
    header = ONE_LAYER_HEADER + 4 * (params.shape.layers - 1)
    assert len(serialize_pk(pk)) == header + (params.pk_bits + 7) // 8
    assert deserialize_pk(serialize_pk(pk)) == pk


def test_first_preset_file_sizes() -> None:
    """The 80-bit public key carries 2401 bits in 301 bytes."""
    params = PRESETS["cs1-80"]
    pk = PublicKey(params, (DenseRingElement.zero(params.r),))
    assert len(serialize_pk(pk)) == ONE_LAYER_HEADER + 301


def test_preset_identity_survives(rng: np.random.Generator) -> None:
    """Files written under a preset read back as that preset."""
    params = PRESETS["cs2-80"]
    pk, _ = keygen(params, rng)
    assert deserialize_pk(serialize_pk(pk)) == pk


def test_header_errors(small_params: ParameterSet, rng: np.random.Generator) -> None:
    """Magic, version and kind are checked before anything else."""
    pk, _ = keygen(small_params, rng)
    data = serialize_pk(pk)
    with pytest.raises(BadMagic):
        deserialize_pk(b"-----BEGIN KEY-----")
    with pytest.raises(UnsupportedVersion):
        deserialize_pk(MAGIC[:6] + b"\x00\x02" + data[8:])
    with pytest.raises(WrongKind, match="expected private_key, found public_key"):
        deserialize_sk(data)
    with pytest.raises(WrongKind, match="unknown kind byte"):
        deserialize_pk(data[:8] + b"\x05" + data[9:])
    with pytest.raises(Truncated):
        deserialize_pk(b"CSMD")
    with pytest.raises(MalformedPayload, match="layer count"):
        deserialize_pk(data[:13] + struct.pack("<I", 3) + data[17:])
    with pytest.raises(MalformedPayload, match="invalid parameter block"):
        deserialize_pk(data[:25] + struct.pack("<H", 12) + data[27:])


def test_payload_errors(small_params: ParameterSet, rng: np.random.Generator) -> None:
    """Payload length, padding and coordinates are validated."""
    pk, sk = keygen(small_params, rng)
    c = encrypt(pk, sample_error(small_params.n, small_params.t, rng))
    ct_data = serialize_ct(c)
    with pytest.raises(Truncated):
        deserialize_ct(ct_data[:-1])
    with pytest.raises(TrailingData):
        deserialize_ct(ct_data + b"\x00")
    with pytest.raises(NonzeroPadding):
        deserialize_ct(ct_data[:-1] + bytes([ct_data[-1] | 0x80]))

    sk_data = bytearray(serialize_sk(sk))
    out_of_range = bytearray(sk_data)
    struct.pack_into("<I", out_of_range, len(out_of_range) - 4, small_params.r)
    with pytest.raises(CoordinateOutOfRange):
        deserialize_sk(bytes(out_of_range))
    unordered = bytearray(sk_data)
    struct.pack_into("<I", unordered, len(unordered) - 4, 0)
    with pytest.raises(MalformedPayload, match="strictly increasing"):
        deserialize_sk(bytes(unordered))
