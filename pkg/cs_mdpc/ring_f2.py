"""Arithmetic in the ring of binary circulant matrices, i.e. F2[x]/(x^r - 1).

A circulant matrix is identified with its first row. Dense elements keep the
coefficient vector in a Python ``int`` (bit j is the coefficient of x^j), sparse
elements keep the sorted list of their nonzero coordinates. Every product that
occurs in the cryptosystem has at least one sparse operand, so multiplication is
the XOR of a few cyclic rotations of the dense factor.
"""

from collections.abc import Callable, Iterable
from dataclasses import dataclass

import numpy as np

from .errors import InvariantViolation, NonzeroPadding, NotInvertible
from .utils import assert_condition, byte_length, reverse_bits


@dataclass(frozen=True, slots=True)
class DenseRingElement:
    """An element of F2[x]/(x^r - 1) stored as an r-bit vector.

    Args:
        r: Block size in bits.
        bits: Coefficient vector; bit j is the coefficient of x^j, i.e. entry h_j of
            the first row of ``cir(h)``.
    """

    r: int
    bits: int

    def __post_init__(self) -> None:
        """Reject a block size below one and coefficients beyond x^(r-1)."""
        assert_condition(self.r >= 1, lambda: f"block size must be positive, got {self.r}")
        assert_condition(
            0 <= self.bits < (1 << self.r),
            lambda: f"coefficient vector does not fit in {self.r} bits",
        )

    @classmethod
    def zero(cls, r: int) -> "DenseRingElement":
        """Return the additive identity."""
        return cls(r, 0)

    @classmethod
    def one(cls, r: int) -> "DenseRingElement":
        """Return the multiplicative identity."""
        return cls(r, 1)

    @classmethod
    def monomial(cls, r: int, k: int) -> "DenseRingElement":
        """Return x^k, with ``k`` reduced modulo ``r``."""
        return cls(r, 1 << (k % r))

    @classmethod
    def from_support(cls, r: int, coords: Iterable[int]) -> "DenseRingElement":
        """Build the element whose coefficients are 1 exactly at ``coords``.

        Raises:
            UsageError: If a coordinate is out of range or repeated.
        """
        return SparseSupport.from_coords(r, coords).densify()

    def coefficient(self, j: int) -> int:
        """Return the coefficient of x^j."""
        return (self.bits >> (j % self.r)) & 1

    def support(self) -> tuple[int, ...]:
        """Return the sorted coordinates of the nonzero coefficients."""
        return tuple(np.flatnonzero(_unpack(self.bits, self.r)).tolist())

    def to_bytes(self) -> bytes:
        """Serialize to ceil(r/8) bytes, bit j at byte j // 8, bit j % 8."""
        return self.bits.to_bytes(byte_length(self.r), "little")

    @classmethod
    def from_bytes(cls, r: int, data: bytes) -> "DenseRingElement":
        """Parse the output of :meth:`to_bytes`.

        Raises:
            UsageError: If ``data`` does not have exactly ceil(r/8) bytes.
            NonzeroPadding: If any bit at position r or above is set.
        """
        assert_condition(
            len(data) == byte_length(r),
            lambda: f"expected {byte_length(r)} bytes for r={r}, got {len(data)}",
        )
        bits = int.from_bytes(data, "little")
        if bits >> r:
            raise NonzeroPadding(f"padding bits above position {r} are not zero")
        return cls(r, bits)

    def to_unpacked(self) -> bytearray:
        """Return a mutable buffer holding one byte (0 or 1) per coefficient."""
        return bytearray(_unpack(self.bits, self.r).tobytes())

    @classmethod
    def from_unpacked(cls, buffer: bytes | bytearray) -> "DenseRingElement":
        """Inverse of :meth:`to_unpacked`.

        Raises:
            UsageError: If the buffer is empty or holds values other than 0 and 1.
        """
        assert_condition(len(buffer) > 0, "unpacked buffer must not be empty")
        unpacked = np.frombuffer(bytes(buffer), dtype=np.uint8)
        assert_condition(int(unpacked.max()) <= 1, "unpacked buffer must hold only 0 and 1")
        packed = np.packbits(unpacked, bitorder="little")
        return cls(len(buffer), int.from_bytes(packed.tobytes(), "little"))


@dataclass(frozen=True, slots=True)
class SparseSupport:
    """A sparse ring element given by its strictly increasing nonzero coordinates.

    This is the decoder's native key form: one list of d_v coordinates per block.

    Args:
        r: Block size in bits.
        support: Strictly increasing coordinates in ``[0, r)``.
    """

    r: int
    support: tuple[int, ...]

    def __post_init__(self) -> None:
        """Validate ordering and range of the coordinates."""
        assert_condition(self.r >= 1, lambda: f"block size must be positive, got {self.r}")
        previous = -1
        for coordinate in self.support:
            assert_condition(
                previous < coordinate < self.r,
                lambda: f"support must be strictly increasing within [0, {self.r}): {self.support}",
            )
            previous = coordinate

    @classmethod
    def from_coords(cls, r: int, coords: Iterable[int]) -> "SparseSupport":
        """Sort ``coords`` into a support, rejecting repeated coordinates.

        Raises:
            UsageError: If a coordinate repeats or falls outside ``[0, r)``.
        """
        ordered = sorted(int(c) for c in coords)
        assert_condition(
            len(set(ordered)) == len(ordered), lambda: f"repeated coordinate in {ordered}"
        )
        return cls(r, tuple(ordered))

    @classmethod
    def from_dense(cls, a: DenseRingElement) -> "SparseSupport":
        """Return the support of a dense element."""
        return cls(a.r, a.support())

    @property
    def weight(self) -> int:
        """Number of nonzero coordinates."""
        return len(self.support)

    def densify(self) -> DenseRingElement:
        """Return the same element in dense form."""
        bits = 0
        for coordinate in self.support:
            bits |= 1 << coordinate
        return DenseRingElement(self.r, bits)

    def transpose(self) -> "SparseSupport":
        """Return a(x^-1): the first row of the transposed circulant matrix."""
        return SparseSupport.from_coords(self.r, ((-c) % self.r for c in self.support))


def _unpack(bits: int, r: int) -> np.ndarray:
    """Expand an r-bit integer into a uint8 array of its coefficients."""
    raw = np.frombuffer(bits.to_bytes(byte_length(r), "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:r]


def _pack(coefficients: np.ndarray) -> int:
    """Collapse a 0/1 array into the integer coefficient vector."""
    return int.from_bytes(np.packbits(coefficients, bitorder="little").tobytes(), "little")


def _rotl(bits: int, k: int, r: int, mask: int) -> int:
    """Multiply by x^k for ``0 <= k < r``."""
    return ((bits << k) | (bits >> (r - k))) & mask


def _check_same_r(a_r: int, b_r: int) -> None:
    assert_condition(a_r == b_r, lambda: f"block sizes differ: {a_r} != {b_r}")


def add(a: DenseRingElement, b: DenseRingElement) -> DenseRingElement:
    """Return a + b (coefficient-wise XOR).

    Raises:
        UsageError: If the block sizes differ.
    """
    _check_same_r(a.r, b.r)
    return DenseRingElement(a.r, a.bits ^ b.bits)


def rotate(a: DenseRingElement, k: int) -> DenseRingElement:
    """Return x^k * a; ``k`` may be any integer."""
    return DenseRingElement(a.r, _rotl(a.bits, k % a.r, a.r, (1 << a.r) - 1))


def weight(a: DenseRingElement) -> int:
    """Return the Hamming weight of ``a``."""
    return a.bits.bit_count()


def transpose(a: DenseRingElement) -> DenseRingElement:
    """Return a(x^-1), mapping coefficient j to (-j) mod r."""
    return rotate(DenseRingElement(a.r, reverse_bits(a.bits, a.r)), 1)


def mul_dense_sparse(a: DenseRingElement, b: SparseSupport) -> DenseRingElement:
    """Return a * b as the XOR of the rotations of ``a`` named by ``b``.

    Raises:
        UsageError: If the block sizes differ.
    """
    _check_same_r(a.r, b.r)
    r = a.r
    mask = (1 << r) - 1
    product = 0
    for k in b.support:
        product ^= _rotl(a.bits, k, r, mask)
    return DenseRingElement(r, product)


def mul_sparse_sparse(a: SparseSupport, b: SparseSupport) -> DenseRingElement:
    """Return the dense convolution of two sparse elements.

    Raises:
        UsageError: If the block sizes differ.
    """
    _check_same_r(a.r, b.r)
    r = a.r
    coefficients = np.zeros(r, dtype=np.uint8)
    if a.support and b.support:
        positions = np.add.outer(np.asarray(a.support), np.asarray(b.support)) % r
        np.bitwise_xor.at(coefficients, positions.ravel(), 1)
    return DenseRingElement(r, _pack(coefficients))


def mul(a: DenseRingElement, b: DenseRingElement) -> DenseRingElement:
    """Return a * b for two dense operands (iterating over the support of ``b``)."""
    return mul_dense_sparse(a, SparseSupport.from_dense(b))


StepObserver = Callable[[int, int, int, int], None]


def _degree(value: int) -> int:
    """Degree of a binary polynomial, -1 for the zero polynomial."""
    return value.bit_length() - 1


def invert(
    h: DenseRingElement,
    *,
    checked: bool = False,
    on_step: StepObserver | None = None,
) -> DenseRingElement:
    """Return h^-1 modulo x^r - 1 with the paired-buffer extended Euclidean algorithm.

    The algorithm tracks f = b*h + u*m and g = c*h + v*m (m = x^r + 1, u and v never
    materialised). Since deg f + deg c <= r and deg g + deg b <= r hold throughout,
    f shares an (r+2)-bit buffer with c and g shares one with b: the cofactor grows
    from bit 0 upwards while the polynomial is stored bit-reversed from bit r+1
    downwards, so coefficient i of the polynomial sits at bit r+1-i.

    Args:
        h: Element to invert.
        checked: Verify the degree invariants after every reduction step.
        on_step: Optional observer called with ``(deg f, deg c, deg g, deg b)`` after
            every reduction step.

    Returns:
        DenseRingElement: g with h * g = 1.

    Raises:
        NotInvertible: If gcd(h, x^r - 1) != 1.
        InvariantViolation: In checked mode, if a degree bound is exceeded.
    """
    r = h.r
    if h.bits == 0:
        raise NotInvertible("zero is not invertible")

    top = r + 1
    full = (1 << (top + 1)) - 1
    # (f, c) = (x^r + 1, 1); (g, b) = (h, 0)
    pair_fc = (1 << top) | (1 << 1) | 1
    pair_gb = reverse_bits(h.bits, top + 1)
    deg_f = r
    deg_g = _degree(h.bits)

    def low_mask(deg_poly: int) -> int:
        return full if deg_poly < 0 else (1 << (top - deg_poly)) - 1

    while deg_f >= 0 and deg_g >= 0:
        if deg_f < deg_g:
            pair_fc, pair_gb = pair_gb, pair_fc
            deg_f, deg_g = deg_g, deg_f
        shift = deg_f - deg_g
        mask_fc = low_mask(deg_f)
        mask_gb = low_mask(deg_g)
        c = pair_fc & mask_fc
        b = pair_gb & mask_gb
        g_stored = pair_gb ^ b

        # f <- f + x^shift * g, b <- b + x^shift * c
        pair_fc ^= g_stored >> shift
        b ^= c << shift
        if checked and _degree(b) + deg_g > r:
            raise InvariantViolation(f"deg(g) + deg(b) = {deg_g + _degree(b)} exceeds r = {r}")
        pair_gb = g_stored | b

        f_stored = pair_fc & ~mask_fc
        deg_f = top - _degree(f_stored & -f_stored) if f_stored else -1

        if checked or on_step is not None:
            deg_c = _degree(pair_fc & low_mask(deg_f))
            deg_b = _degree(b)
            if checked and deg_f + deg_c > r:
                raise InvariantViolation(f"deg(f) + deg(c) = {deg_f + deg_c} exceeds r = {r}")
            if on_step is not None:
                on_step(deg_f, deg_c, deg_g, deg_b)

    if deg_g != 0:
        raise NotInvertible(f"gcd(h, x^{r} - 1) has degree {deg_g}")

    # f is zero, so the whole (f, c) buffer is the cofactor c; deg c <= r
    inverse = pair_fc
    inverse = (inverse & ((1 << r) - 1)) ^ (inverse >> r)
    return DenseRingElement(r, inverse)


__all__ = [
    "DenseRingElement",
    "SparseSupport",
    "add",
    "rotate",
    "weight",
    "transpose",
    "mul_dense_sparse",
    "mul_sparse_sparse",
    "mul",
    "invert",
]
