"""Tests for cyclosymmetric blocks, their compression and sampling."""

import numpy as np
import pytest

from cs_mdpc.cyclosym import (
    CompressedBlock,
    LayerShape,
    compress,
    expand,
    is_cyclosymmetric,
    orbit,
    sample_cyclosymmetric_error,
    sample_sparse_cyclosymmetric,
)
from cs_mdpc.errors import NonzeroPadding, NotInvertible, UsageError
from cs_mdpc.ring_f2 import (
    DenseRingElement,
    SparseSupport,
    invert,
    mul_dense_sparse,
    mul_sparse_sparse,
)

SMALL_SHAPES = [
    LayerShape((7,)),
    LayerShape((101,)),
    LayerShape((3, 5)),
    LayerShape((5, 7)),
    LayerShape((8,)),
    LayerShape((3, 4)),
]


@pytest.mark.parametrize(
    ("factors", "message"),
    [
        ((2,), "at least 3"),
        ((1,), "at least 3"),
        ((3, 9), "coprime"),
        ((4, 6), "coprime"),
        ((3, 5, 7), "1 or 2"),
    ],
)
def test_invalid_shapes(factors: tuple[int, ...], message: str) -> None:
    """Tiny, non-coprime and three-layer shapes are rejected."""
    with pytest.raises(UsageError, match=message):
        LayerShape(factors)


def test_shape_notation() -> None:
    """Shapes parse and print in ``p1xp2`` notation."""
    assert LayerShape.parse("61x79") == LayerShape((61, 79))
    assert str(LayerShape((61, 79))) == "61x79"
    assert LayerShape.parse("4801").r == 4801
    with pytest.raises(UsageError, match="invalid layer shape"):
        LayerShape.parse("61*79")


@pytest.mark.parametrize(
    ("factors", "length"),
    [
        ((4801,), 2401),
        ((32771,), 16386),
        ((61, 79), 1240),
        ((47, 167), 2016),
        ((71, 139), 2520),
        ((103, 199), 5200),
        ((73, 449), 8325),
    ],
)
def test_compressed_length(factors: tuple[int, ...], length: int) -> None:
    """The compressed length is the product of floor(p/2) + 1."""
    assert LayerShape(factors).compressed_length == length


def test_orbits() -> None:
    """Orbits are the sign classes of the CRT components."""
    one_layer = LayerShape((7,))
    assert orbit(0, one_layer) == (0,)
    assert orbit(2, one_layer) == (2, 5)

    two_layers = LayerShape((3, 5))
    assert orbit(0, two_layers) == (0,)
    assert orbit(1, two_layers) == (1, 4, 11, 14)
    assert orbit(6, two_layers) == (6, 9)
    assert two_layers.crt(1, 4) == 4
    assert two_layers.representatives() == (0, 6, 12, 10, 1, 7)
    with pytest.raises(UsageError, match="outside"):
        orbit(15, two_layers)


def test_even_layer_sizes(rng: np.random.Generator) -> None:
    """An even layer size p adds the fixed point p/2 to the orbit of 0."""
    one_layer = LayerShape((8,))
    assert one_layer.compressed_length == 5
    assert orbit(4, one_layer) == (4,)
    assert orbit(3, one_layer) == (3, 5)

    two_layers = LayerShape((3, 4))
    assert two_layers.compressed_length == 6
    assert orbit(6, two_layers) == (6,)
    assert orbit(2, two_layers) == (2, 10)
    assert orbit(1, two_layers) == (1, 5, 7, 11)
    for _ in range(10):
        support = sample_sparse_cyclosymmetric(two_layers, 3, rng).support
        assert 0 in support or 6 in support
    check_closure(two_layers, 3, 20, rng)


@pytest.mark.parametrize("shape", SMALL_SHAPES, ids=str)
def test_orbits_partition_the_block(shape: LayerShape) -> None:
    """The orbits of the representatives cover every coordinate exactly once."""
    covered = [c for m in shape.representatives() for c in orbit(m, shape)]
    assert sorted(covered) == list(range(shape.r))
    assert len(shape.representatives()) == shape.compressed_length


def test_is_cyclosymmetric() -> None:
    """Only unions of whole orbits pass."""
    shape = LayerShape((3, 5))
    assert is_cyclosymmetric(SparseSupport(15, (1, 4, 11, 14)), shape)
    assert is_cyclosymmetric(DenseRingElement.from_support(15, [0, 6, 9]), shape)
    assert not is_cyclosymmetric(SparseSupport(15, (1, 4)), shape)
    with pytest.raises(UsageError, match="does not match"):
        is_cyclosymmetric(SparseSupport(7, ()), shape)


@pytest.mark.parametrize("shape", SMALL_SHAPES, ids=str)
def test_compress_expand(shape: LayerShape, rng: np.random.Generator) -> None:
    """Expansion undoes compression."""
    for w in (0, 1, 2, 5):
        block = sample_sparse_cyclosymmetric(shape, w, rng)
        compressed = compress(block, shape)
        assert expand(compressed) == block.densify()
        assert CompressedBlock.from_bytes(shape, compressed.to_bytes()) == compressed


def test_compress_rejects_asymmetric_elements() -> None:
    """Compression needs a cyclosymmetric element."""
    with pytest.raises(UsageError, match="not cyclosymmetric"):
        compress(SparseSupport(7, (1,)), LayerShape((7,)))


def test_compressed_padding() -> None:
    """Bits past the compressed length must be zero."""
    shape = LayerShape((3, 5))
    assert CompressedBlock.from_bytes(shape, b"\x21").bits == 0x21
    with pytest.raises(NonzeroPadding):
        CompressedBlock.from_bytes(shape, b"\x40")


@pytest.mark.parametrize("shape", SMALL_SHAPES, ids=str)
def test_sampling_hits_exact_weight(shape: LayerShape, rng: np.random.Generator) -> None:
    """Sampled blocks are cyclosymmetric with exactly the requested weight."""
    for w in range(shape.r + 1):
        block = sample_sparse_cyclosymmetric(shape, w, rng)
        assert block.weight == w
        assert is_cyclosymmetric(block, shape)


def test_odd_weight_uses_the_fixed_orbit(rng: np.random.Generator) -> None:
    """Coordinate 0 is in every block of odd weight."""
    shape = LayerShape((61, 79))
    for _ in range(5):
        assert 0 in sample_sparse_cyclosymmetric(shape, 45, rng).support


def test_unreachable_weight(rng: np.random.Generator) -> None:
    """Weights beyond the block cannot be sampled."""
    with pytest.raises(UsageError, match="union of orbits"):
        sample_sparse_cyclosymmetric(LayerShape((3, 5)), 16, rng)
    with pytest.raises(UsageError, match="non-negative"):
        sample_sparse_cyclosymmetric(LayerShape((3, 5)), -1, rng)


def test_cyclosymmetric_error(rng: np.random.Generator) -> None:
    """Errors have weight t and every block is cyclosymmetric."""
    shape = LayerShape((5, 7))
    for t in (0, 3, 10, 21):
        coords = sample_cyclosymmetric_error(shape, 2, t, rng)
        assert len(coords) == t
        assert list(coords) == sorted(set(coords))
        for b in range(2):
            block = [c - b * shape.r for c in coords if b * shape.r <= c < (b + 1) * shape.r]
            assert is_cyclosymmetric(SparseSupport(shape.r, tuple(block)), shape)


def check_closure(shape: LayerShape, w: int, samples: int, rng: np.random.Generator) -> None:
    """Products and inverses of cyclosymmetric elements stay cyclosymmetric."""
    for _ in range(samples):
        a = sample_sparse_cyclosymmetric(shape, w, rng)
        b = sample_sparse_cyclosymmetric(shape, w, rng)
        product = mul_sparse_sparse(a, b)
        assert is_cyclosymmetric(product, shape)
        assert mul_dense_sparse(a.densify(), b) == product
        try:
            inverse = invert(a.densify())
        except NotInvertible:
            continue
        assert is_cyclosymmetric(inverse, shape)
        assert is_cyclosymmetric(mul_dense_sparse(inverse, b), shape)


def test_subring_closure_small(rng: np.random.Generator) -> None:
    """Closure on the 3x5 shape and a single layer."""
    check_closure(LayerShape((3, 5)), 5, 100, rng)
    check_closure(LayerShape((101,)), 9, 20, rng)


def test_subring_closure_two_layer_preset(rng: np.random.Generator) -> None:
    """Closure at r = 61 * 79."""
    check_closure(LayerShape((61, 79)), 45, 3, rng)


@pytest.mark.slow
def test_subring_closure_acceptance(rng: np.random.Generator) -> None:
    """A hundred samples at r = 61 * 79."""
    check_closure(LayerShape((61, 79)), 45, 100, rng)
