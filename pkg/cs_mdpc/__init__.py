"""Re-export the public surface area for convenient importing."""

from . import cyclosym, formats, ring_f2, tuning
from .cwe import ErrorVector, PlaintextInteger, rank, sample_error, unrank
from .decoder import DecodeOutcome, DecoderConfig, decode, reference_bitflip
from .errors import CryptoFailure, CsMdpcError, FormatError, UsageError
from .kem import (
    Cryptogram,
    PrivateKey,
    PublicKey,
    decrypt,
    decrypt_message,
    encrypt,
    encrypt_message,
    keygen,
    try_decrypt,
)
from .params import PRESETS, ParameterSet, custom_params, load_params
from .StringLogger import StringLogger, default_logger

__all__ = [
    "ring_f2",
    "cyclosym",
    "formats",
    "tuning",
    "ErrorVector",
    "PlaintextInteger",
    "rank",
    "unrank",
    "sample_error",
    "DecoderConfig",
    "DecodeOutcome",
    "decode",
    "reference_bitflip",
    "CsMdpcError",
    "UsageError",
    "CryptoFailure",
    "FormatError",
    "PublicKey",
    "PrivateKey",
    "Cryptogram",
    "keygen",
    "encrypt",
    "decrypt",
    "try_decrypt",
    "encrypt_message",
    "decrypt_message",
    "ParameterSet",
    "PRESETS",
    "custom_params",
    "load_params",
    "StringLogger",
    "default_logger",
]
