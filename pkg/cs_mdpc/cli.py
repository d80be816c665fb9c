"""Command-line front end: ``cs-mdpc <command> [options]``.

Exit codes: 0 success, 1 usage error, 2 failed key generation or decryption, 3 I/O or
parse error.
"""

import argparse
import io
import os
import sys
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import NoReturn, TextIO

import numpy as np

from .cwe import ErrorVector, sample_error
from .decoder import DecoderConfig
from .errors import CryptoFailure, FormatError, KeygenFailure, UsageError
from .formats import (
    deserialize_ct,
    deserialize_pk,
    deserialize_sk,
    serialize_ct,
    serialize_pk,
    serialize_sk,
)
from .kem import decrypt, decrypt_message, encrypt, encrypt_message, keygen
from .params import PRESETS, ParameterSet, load_params
from .StringLogger import default_logger
from .tuning import (
    DeltaRow,
    ThetaEstimate,
    TrialRecord,
    estimate_theta0,
    measure_dfr,
    tune_delta,
    write_csv,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CRYPTO = 2
EXIT_IO = 3

STDIO = "-"


class _Parser(argparse.ArgumentParser):
    """Argument parser that raises :class:`UsageError` instead of exiting."""

    def error(self, message: str) -> NoReturn:
        """Turn a parse error into a :class:`UsageError`."""
        raise UsageError(f"{self.prog}: {message}")


def _write_stdout(data: bytes, stdout: TextIO) -> None:
    stdout.flush()
    buffer = getattr(stdout, "buffer", None)
    if buffer is not None:
        buffer.write(data)
        buffer.flush()
    else:
        stdout.write(data.decode("latin-1"))


def _write_outputs(outputs: Sequence[tuple[str, bytes]], stdout: TextIO) -> None:
    """Write every payload to its target, or no file at all.

    Files are staged as ``<target>.tmp`` and renamed only after all of them are on
    disk. Standard output (``-``) is written last.
    """
    staged: list[tuple[Path, Path]] = []
    try:
        for path, data in outputs:
            if path == STDIO:
                continue
            target = Path(path)
            tmp = target.with_suffix(target.suffix + ".tmp")
            staged.append((tmp, target))
            with open(tmp, "wb") as f:
                f.write(data)
                f.flush()
                os.fsync(f.fileno())
        for tmp, target in staged:
            os.replace(tmp, target)
    finally:
        for tmp, _ in staged:
            tmp.unlink(missing_ok=True)
    for path, data in outputs:
        if path == STDIO:
            _write_stdout(data, stdout)


def _write_output(path: str, data: bytes, stdout: TextIO) -> None:
    _write_outputs([(path, data)], stdout)


def _read_input(path: str) -> bytes:
    if path == STDIO:
        return sys.stdin.buffer.read()
    return Path(path).read_bytes()


def _rng(seed: int | None) -> np.random.Generator:
    return np.random.default_rng(seed)


def _params(args: argparse.Namespace) -> ParameterSet:
    return load_params(args.params, qc=args.qc)


def _csv_bytes(rows: Sequence[object], row_type: type) -> bytes:
    buffer = io.StringIO()
    write_csv(rows, buffer, row_type)
    return buffer.getvalue().encode("utf-8")


def _format_coords(coords: Sequence[int]) -> str:
    return " ".join(str(c) for c in coords)


def _cmd_keygen(args: argparse.Namespace, stdout: TextIO, stderr: TextIO) -> int:
    params = _params(args)
    pk, sk = keygen(params, _rng(args.seed))
    _write_outputs([(args.sk, serialize_sk(sk)), (args.pk, serialize_pk(pk))], stdout)
    if not params.is_preset:
        print(f"warning: {params.id}: {params.security_label}", file=stderr)
    return EXIT_OK


def _cmd_encrypt(args: argparse.Namespace, stdout: TextIO, stderr: TextIO) -> int:
    pk = deserialize_pk(_read_input(args.pk))
    params = pk.params
    if args.random_error:
        if args.out == STDIO:
            raise UsageError("--random-error prints coordinates; give the cryptogram an --out file")
        e = sample_error(params.n, params.t, _rng(args.seed))
        c = encrypt(pk, e)
        _write_output(args.out, serialize_ct(c), stdout)
        print(_format_coords(e.support()), file=stdout)
    else:
        c = encrypt_message(pk, _read_input(args.input))
        _write_output(args.out, serialize_ct(c), stdout)
    return EXIT_OK


def _cmd_decrypt(args: argparse.Namespace, stdout: TextIO, stderr: TextIO) -> int:
    sk = deserialize_sk(_read_input(args.sk))
    c = deserialize_ct(_read_input(args.ct))
    cfg = DecoderConfig.for_params(sk.params, theta0=args.theta0, delta=args.delta)
    previous = default_logger.enable
    default_logger.enable = True
    try:
        if args.raw:
            e: ErrorVector = decrypt(sk, c, cfg)
            output = (_format_coords(e.support()) + "\n").encode("ascii")
        else:
            output = decrypt_message(sk, c, cfg)
    except CryptoFailure:
        for line in default_logger.pop_all():
            print(line, file=stderr)
        raise
    finally:
        default_logger.enable = previous
        default_logger.pop_all()
    _write_output(args.out, output, stdout)
    return EXIT_OK


def _cmd_estimate_theta(args: argparse.Namespace, stdout: TextIO, stderr: TextIO) -> int:
    params = _params(args)
    estimate = estimate_theta0(params, args.trials, args.trials, _rng(args.seed))
    _write_output(args.out, _csv_bytes([estimate], ThetaEstimate), stdout)
    return EXIT_OK


def _cmd_tune_delta(args: argparse.Namespace, stdout: TextIO, stderr: TextIO) -> int:
    params = _params(args)
    deltas = range(min(args.delta, params.theta0 - 1) + 1)
    rows = tune_delta(params, deltas, args.trials, args.seed or 0)
    _write_output(args.out, _csv_bytes(rows, DeltaRow), stdout)
    return EXIT_OK


def _cmd_simulate(args: argparse.Namespace, stdout: TextIO, stderr: TextIO) -> int:
    params = _params(args)
    cfg = DecoderConfig.for_params(params, theta0=args.theta0, delta=args.delta)
    report = measure_dfr(params, args.trials, args.seed or 0, jobs=args.jobs, cfg=cfg)
    _write_output(args.out, _csv_bytes(report.records, TrialRecord), stdout)
    print(report.summary(), file=stderr)
    return EXIT_OK


def _cmd_params(args: argparse.Namespace, stdout: TextIO, stderr: TextIO) -> int:
    selected = [_params(args)] if args.params else list(PRESETS.values())
    header = ("id", "mode", "r", "n", "pk_bits", "published", "ct_bits", "msg_bytes", "security")
    print("\t".join(header), file=stdout)
    for params in selected:
        published = "-" if params.published_pk_bits is None else str(params.published_pk_bits)
        row = (
            params.id,
            params.mode,
            str(params.r),
            str(params.n),
            str(params.pk_bits),
            published,
            str(params.ct_bits),
            str(params.message_capacity),
            params.security_label,
        )
        print("\t".join(row), file=stdout)
    return EXIT_OK


Command = Callable[[argparse.Namespace, TextIO, TextIO], int]


def build_parser() -> argparse.ArgumentParser:
    """Return the argument parser of the ``cs-mdpc`` command."""
    parser = _Parser(prog="cs-mdpc", description="CS-MDPC Niederreiter encryption toolkit")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name: str, handler: Command, help_text: str) -> argparse.ArgumentParser:
        sub = commands.add_parser(name, help=help_text)
        sub.set_defaults(handler=handler)
        return sub

    def add_params(sub: argparse.ArgumentParser, default: str | None = "cs1-80") -> None:
        sub.add_argument("--params", default=default, help="preset id or parameter file")
        sub.add_argument("--qc", action="store_true", help="use plain QC-MDPC keys")

    def add_seed(sub: argparse.ArgumentParser) -> None:
        sub.add_argument("--seed", type=int, default=None, help="random seed")

    def add_decoder(sub: argparse.ArgumentParser) -> None:
        sub.add_argument("--theta0", type=int, default=None, help="initial threshold")
        sub.add_argument("--delta", type=int, default=None, help="threshold margin")

    sub = add("keygen", _cmd_keygen, "generate a key pair")
    add_params(sub)
    add_seed(sub)
    sub.add_argument("--pk", required=True, help="public key output file")
    sub.add_argument("--sk", required=True, help="private key output file")

    sub = add("encrypt", _cmd_encrypt, "encrypt a message or a random error")
    sub.add_argument("--pk", required=True, help="public key file")
    sub.add_argument("--in", dest="input", default=STDIO, help="message file, - for stdin")
    sub.add_argument("--out", default=STDIO, help="cryptogram file, - for stdout")
    sub.add_argument("--random-error", action="store_true", help="encrypt a random error")
    add_seed(sub)

    sub = add("decrypt", _cmd_decrypt, "decrypt a cryptogram")
    sub.add_argument("--sk", required=True, help="private key file")
    sub.add_argument("--ct", required=True, help="cryptogram file, - for stdin")
    sub.add_argument("--out", default=STDIO, help="message file, - for stdout")
    sub.add_argument("--raw", action="store_true", help="print error coordinates instead")
    add_decoder(sub)

    sub = add("estimate-theta", _cmd_estimate_theta, "estimate theta0 as CSV")
    add_params(sub)
    add_seed(sub)
    sub.add_argument("--trials", type=int, default=100, help="codes and errors per code")
    sub.add_argument("--out", default=STDIO, help="CSV output, - for stdout")

    sub = add("tune-delta", _cmd_tune_delta, "scan delta = 0..D as CSV")
    add_params(sub)
    add_seed(sub)
    sub.add_argument("--trials", type=int, default=100, help="decodings per delta")
    sub.add_argument("--delta", type=int, default=12, help="largest delta to try")
    sub.add_argument("--out", default=STDIO, help="CSV output, - for stdout")

    sub = add("simulate", _cmd_simulate, "measure the decoding failure rate as CSV")
    add_params(sub)
    add_seed(sub)
    add_decoder(sub)
    sub.add_argument("--trials", type=int, default=1000, help="round trips")
    sub.add_argument("--jobs", type=int, default=1, help="worker processes")
    sub.add_argument("--out", default=STDIO, help="CSV output, - for stdout")

    sub = add("params", _cmd_params, "list parameter sets")
    add_params(sub, default=None)
    return parser


def run(
    argv: Sequence[str] | None = None,
    *,
    stdout: TextIO | None = None,
    stderr: TextIO | None = None,
) -> int:
    """Run one command and return its exit code.

    Args:
        argv: Arguments without the program name; defaults to ``sys.argv[1:]``.
        stdout: Output stream; defaults to ``sys.stdout``.
        stderr: Diagnostic stream; defaults to ``sys.stderr``.
    """
    out = stdout or sys.stdout
    err = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        return args.handler(args, out, err)
    except UsageError as error:
        print(f"error: {error}", file=err)
        return EXIT_USAGE
    except CryptoFailure as error:
        action = "key generation" if isinstance(error, KeygenFailure) else "decryption"
        print(f"{action} failed: {error}", file=err)
        return EXIT_CRYPTO
    except (FormatError, OSError) as error:
        print(f"error: {error}", file=err)
        return EXIT_IO


def main() -> None:
    """Console-script entry point."""
    sys.exit(run())


__all__ = ["EXIT_OK", "EXIT_USAGE", "EXIT_CRYPTO", "EXIT_IO", "build_parser", "run", "main"]
