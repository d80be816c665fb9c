"""Tests for the ``cs-mdpc`` command line."""

import io
from pathlib import Path

import pytest

from cs_mdpc.cli import EXIT_CRYPTO, EXIT_IO, EXIT_OK, EXIT_USAGE, run
from cs_mdpc.cwe import ErrorVector
from cs_mdpc.formats import deserialize_pk, serialize_ct
from cs_mdpc.kem import encrypt
from cs_mdpc.params import PRESETS

SMALL_LINE = "small 2 211 11 4 10 1\n"


def invoke(*argv: str) -> tuple[int, str, str]:
    """Run the command line and capture both streams."""
    stdout = io.StringIO()
    stderr = io.StringIO()
    code = run(list(argv), stdout=stdout, stderr=stderr)
    return code, stdout.getvalue(), stderr.getvalue()


@pytest.fixture(scope="module")
def small_file(tmp_path_factory: pytest.TempPathFactory) -> Path:
    """A one-line parameter file for the toy set."""
    path = tmp_path_factory.mktemp("params") / "small.txt"
    path.write_text(SMALL_LINE, encoding="utf-8")
    return path


@pytest.fixture(scope="module")
def small_keys(tmp_path_factory: pytest.TempPathFactory, small_file: Path) -> tuple[Path, Path]:
    """A toy key pair written by ``keygen``."""
    directory = tmp_path_factory.mktemp("keys")
    pk, sk = directory / "small.pk", directory / "small.sk"
    code, _, err = invoke(
        "keygen", "--params", str(small_file), "--seed", "1", "--pk", str(pk), "--sk", str(sk)
    )
    assert code == EXIT_OK
    assert err == "warning: small: no security claim\n"
    return pk, sk


def test_params_listing() -> None:
    """Every preset is listed with its sizes."""
    code, out, _ = invoke("params")
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0].split("\t")[:3] == ["id", "mode", "r"]
    assert len(lines) == 1 + len(PRESETS)
    fields = next(line for line in lines if line.startswith("cs1-80\t")).split("\t")
    assert fields[1] == "CS"
    assert fields[4] == fields[5] == "2401"
    assert fields[6] == "4801"
    assert fields[7] == str(PRESETS["cs1-80"].message_capacity)
    assert fields[8] == "2^80"


def test_params_single(small_file: Path) -> None:
    """``--params`` restricts the listing; custom sets have no printed size."""
    code, out, _ = invoke("params", "--params", str(small_file), "--qc")
    assert code == EXIT_OK
    fields = out.splitlines()[1].split("\t")
    assert fields[:5] == ["small-qc", "QC", "211", "422", "211"]
    assert fields[5] == "-"
    assert fields[8] == "no security claim"


def test_message_round_trip(small_keys: tuple[Path, Path], tmp_path: Path) -> None:
    """keygen, encrypt and decrypt through files."""
    pk, sk = small_keys
    message, ct, back = tmp_path / "message", tmp_path / "message.ct", tmp_path / "message.out"
    message.write_bytes(b"\x7f")
    assert invoke("encrypt", "--pk", str(pk), "--in", str(message), "--out", str(ct))[0] == 0
    assert not ct.with_suffix(".ct.tmp").exists()
    code, _, _ = invoke("decrypt", "--sk", str(sk), "--ct", str(ct), "--out", str(back))
    assert code == EXIT_OK
    assert back.read_bytes() == b"\x7f"


def test_keygen_is_reproducible(small_file: Path, tmp_path: Path) -> None:
    """The same seed writes the same key files."""
    outputs = []
    for name in ("a", "b"):
        pk, sk = tmp_path / f"{name}.pk", tmp_path / f"{name}.sk"
        invoke("keygen", "--params", str(small_file), "--seed", "7",
               "--pk", str(pk), "--sk", str(sk))
        outputs.append((pk.read_bytes(), sk.read_bytes()))
    assert outputs[0] == outputs[1]


def test_keygen_leaves_no_partial_keys(small_file: Path, tmp_path: Path) -> None:
    """An unwritable public key path leaves no private key behind."""
    sk, pk = tmp_path / "lonely.sk", tmp_path / "missing" / "lonely.pk"
    code, _, err = invoke("keygen", "--params", str(small_file), "--seed", "1",
                          "--pk", str(pk), "--sk", str(sk))
    assert code == EXIT_IO
    assert err.startswith("error: ")
    assert not sk.exists()
    assert not sk.with_suffix(".sk.tmp").exists()


def test_keygen_failure_is_reported(tmp_path: Path) -> None:
    """Key generation that runs out of resamples exits with status 2."""
    params = tmp_path / "even.txt"
    params.write_text("even 2 101 8 4 7 2\n", encoding="utf-8")
    pk, sk = tmp_path / "even.pk", tmp_path / "even.sk"
    code, _, err = invoke("keygen", "--params", str(params), "--seed", "1",
                          "--pk", str(pk), "--sk", str(sk))
    assert code == EXIT_CRYPTO
    assert err.startswith("key generation failed: ")
    assert "decryption" not in err
    assert not pk.exists()
    assert not sk.exists()


def test_random_error_and_raw_decrypt(small_keys: tuple[Path, Path], tmp_path: Path) -> None:
    """The printed coordinates are the ones ``decrypt --raw`` recovers."""
    pk, sk = small_keys
    ct = tmp_path / "random.ct"
    code, out, _ = invoke("encrypt", "--pk", str(pk), "--random-error", "--seed", "3",
                          "--out", str(ct))
    assert code == EXIT_OK
    coords = [int(c) for c in out.split()]
    assert len(coords) == 4
    assert coords == sorted(coords)

    code, out, _ = invoke("decrypt", "--sk", str(sk), "--ct", str(ct), "--raw")
    assert code == EXIT_OK
    assert out == " ".join(map(str, coords)) + "\n"


def test_random_error_needs_a_file(small_keys: tuple[Path, Path]) -> None:
    """Coordinates and cryptogram cannot share standard output."""
    pk, _ = small_keys
    code, _, err = invoke("encrypt", "--pk", str(pk), "--random-error")
    assert code == EXIT_USAGE
    assert "--out" in err


def test_wrong_kind(small_keys: tuple[Path, Path], tmp_path: Path) -> None:
    """A public key passed as the private key is a format error and writes nothing."""
    pk, _ = small_keys
    out = tmp_path / "never"
    code, _, err = invoke("decrypt", "--sk", str(pk), "--ct", str(pk), "--out", str(out))
    assert code == EXIT_IO
    assert "expected private_key" in err
    assert not out.exists()


def test_missing_file(tmp_path: Path) -> None:
    """Unreadable inputs are I/O errors."""
    code, _, _ = invoke("encrypt", "--pk", str(tmp_path / "absent.pk"), "--out", "-")
    assert code == EXIT_IO


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["keygen", "--pk", "a", "--sk", "b", "--bogus"],
        ["keygen", "--params", "cs9-80", "--pk", "a", "--sk", "b"],
        ["simulate", "--trials", "many"],
    ],
)
def test_usage_errors(argv: list[str]) -> None:
    """Bad arguments exit with status 1 and say why."""
    code, _, err = invoke(*argv)
    assert code == EXIT_USAGE
    assert err.startswith("error: ")


def test_message_too_long(small_keys: tuple[Path, Path], tmp_path: Path) -> None:
    """The toy code carries a single byte."""
    pk, _ = small_keys
    message = tmp_path / "long"
    message.write_bytes(b"too long")
    code, _, err = invoke("encrypt", "--pk", str(pk), "--in", str(message), "--out", "-")
    assert code == EXIT_USAGE
    assert "exceeds the limit" in err


def test_foreign_key_fails(small_keys: tuple[Path, Path], small_file: Path, tmp_path: Path) -> None:
    """Decrypting under another key exits with status 2 and prints the decoder trace."""
    pk, _ = small_keys
    other_pk, other_sk = tmp_path / "other.pk", tmp_path / "other.sk"
    invoke("keygen", "--params", str(small_file), "--seed", "2",
           "--pk", str(other_pk), "--sk", str(other_sk))
    # first block only; identity-block coordinates encrypt the same under every key
    error = ErrorVector.from_support(422, [3, 50, 120, 190])
    ct = tmp_path / "foreign.ct"
    ct.write_bytes(serialize_ct(encrypt(deserialize_pk(pk.read_bytes()), error)))
    out = tmp_path / "foreign.out"
    code, _, err = invoke(
        "decrypt", "--sk", str(other_sk), "--ct", str(ct), "--out", str(out), "--raw"
    )
    assert code == EXIT_CRYPTO
    assert "decryption failed" in err
    assert "decrypt:" in err
    assert not out.exists()


def test_estimate_theta(small_file: Path) -> None:
    """One CSV row with the estimate."""
    code, out, _ = invoke("estimate-theta", "--params", str(small_file), "--trials", "3",
                          "--seed", "1")
    assert code == EXIT_OK
    header, row = out.splitlines()
    assert header == "params_id,samples,mean,stddev,theta0"
    assert row.startswith("small,9,")


def test_tune_delta(small_file: Path) -> None:
    """Margins run from 0 up to the requested bound, below theta0."""
    code, out, _ = invoke("tune-delta", "--params", str(small_file), "--trials", "3",
                          "--delta", "2")
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0] == "delta,trials,failures,dfr,mean_iterations,mean_micros"
    assert [line.split(",")[0] for line in lines[1:]] == ["0", "1", "2"]


def test_simulate(small_file: Path, tmp_path: Path) -> None:
    """Per-trial CSV goes to the file, the summary to standard error."""
    csv_path = tmp_path / "trials.csv"
    code, _, err = invoke("simulate", "--params", str(small_file), "--trials", "3",
                          "--seed", "5", "--out", str(csv_path))
    assert code == EXIT_OK
    lines = csv_path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "params_id,seed,trial,outcome,iterations,restarts,peak_weight,micros"
    assert len(lines) == 4
    assert err.startswith("params      small")


@pytest.mark.slow
def test_first_preset_round_trip(tmp_path: Path) -> None:
    """The default 80-bit preset works end to end."""
    pk, sk = tmp_path / "cs1-80.pk", tmp_path / "cs1-80.sk"
    assert invoke("keygen", "--seed", "80", "--pk", str(pk), "--sk", str(sk)) == (0, "", "")
    assert len(pk.read_bytes()) == 29 + 301

    message, ct, back = tmp_path / "m", tmp_path / "m.ct", tmp_path / "m.out"
    message.write_bytes(b"hello, constrained world")
    assert invoke("encrypt", "--pk", str(pk), "--in", str(message), "--out", str(ct))[0] == 0
    assert invoke("decrypt", "--sk", str(sk), "--ct", str(ct), "--out", str(back))[0] == 0
    assert back.read_bytes() == message.read_bytes()
