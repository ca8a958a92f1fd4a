# services/codec/blocks.py
"""
Enumeration of length-n blocks and the constrained random number generator:
sampling a block from a product law restricted to hash cosets.

A block is stored as n joint symbols, one per position; a joint symbol
indexes the product alphabet of the block's variables (mixed radix, first
variable most significant). Blocks are ordered lexicographically by
position, which fixes the inverse-CDF order of every sampler.
"""

from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence, Tuple
import logging

import numpy as np

from icregions.exceptions import CosetEmpty, SupportTooLarge, ValidationFailed
from icregions.services.codec.hashing import LinearHash, symbol_digits

logger = logging.getLogger(__name__)

BLOCK_SPACE_CAP = 2**24
CHUNK = 2**16
TIE_RTOL = 1e-12


@dataclass(frozen=True)
class HashConstraint:
    """f(z_v) == target for the variable at position ``var`` of the block."""

    var: int
    hash: LinearHash
    target: Tuple[int, ...]


class BlockSpace:
    """All length-n blocks over the product of ``sizes``."""

    def __init__(self, sizes: Sequence[int], n: int, cap: int = BLOCK_SPACE_CAP):
        if n < 1:
            raise ValidationFailed(f"block length must be >= 1, got {n}")
        self.sizes = tuple(int(s) for s in sizes)
        self.n = int(n)
        self.symbols = int(np.prod(self.sizes, dtype=np.int64)) if self.sizes else 1
        size = self.symbols**self.n
        if size > cap:
            raise SupportTooLarge(
                f"block space of {self.symbols}^{self.n} = {size} blocks exceeds cap {cap}"
            )
        self.size = size

    def __len__(self) -> int:
        return self.size

    def blocks(self, index: np.ndarray) -> np.ndarray:
        """Lexicographic indices -> (k, n) joint symbols."""
        index = np.asarray(index, dtype=np.int64)
        return np.stack(np.unravel_index(index, (self.symbols,) * self.n), axis=-1)

    def index_of(self, blocks: np.ndarray) -> np.ndarray:
        blocks = np.asarray(blocks, dtype=np.int64).reshape(-1, self.n)
        return np.ravel_multi_index(tuple(blocks.T), (self.symbols,) * self.n)

    def components(self, blocks: np.ndarray) -> np.ndarray:
        """(k, n) joint symbols -> (k, V, n) per-variable values."""
        blocks = np.asarray(blocks, dtype=np.int64)
        return np.stack(np.unravel_index(blocks, self.sizes), axis=-2)

    def join(self, components: np.ndarray) -> np.ndarray:
        """(..., V, n) per-variable values -> (..., n) joint symbols."""
        components = np.asarray(components, dtype=np.int64)
        parts = tuple(components[..., v, :] for v in range(len(self.sizes)))
        return np.ravel_multi_index(parts, self.sizes)

    def chunks(self, chunk: int = CHUNK) -> Iterator[np.ndarray]:
        for start in range(0, self.size, chunk):
            yield np.arange(start, min(start + chunk, self.size), dtype=np.int64)


# ============================================================================
# Weights and constraints
# ============================================================================


def block_weights(blocks: np.ndarray, table: np.ndarray) -> np.ndarray:
    """
    Product law of each block.

    Args:
        blocks: (k, n) joint symbols
        table: (M,) for an i.i.d. law or (n, M) for per-position laws

    Returns:
        (k,) block probabilities (or weights, if ``table`` is unnormalized)
    """
    blocks = np.asarray(blocks, dtype=np.int64)
    table = np.asarray(table, dtype=float)
    if table.ndim == 1:
        return np.prod(table[blocks], axis=-1)
    return np.prod(table[np.arange(blocks.shape[-1]), blocks], axis=-1)


def hash_outputs(
    space: BlockSpace, blocks: np.ndarray, var: int, hash: LinearHash
) -> np.ndarray:
    """Hash of variable ``var`` for each block: (k, l)."""
    values = space.components(blocks)[:, var, :]
    return hash.apply(symbol_digits(values, space.sizes[var], hash.q))


def satisfies(
    space: BlockSpace, blocks: np.ndarray, constraints: Sequence[HashConstraint]
) -> np.ndarray:
    mask = np.ones(len(blocks), dtype=bool)
    for constraint in constraints:
        out = hash_outputs(space, blocks, constraint.var, constraint.hash)
        mask &= np.all(out == np.asarray(constraint.target, dtype=np.int64), axis=1)
    return mask


def coset_indices(
    space: BlockSpace, constraints: Sequence[HashConstraint], chunk: int = CHUNK
) -> np.ndarray:
    """Ascending lexicographic indices of the blocks meeting every constraint."""
    found: List[np.ndarray] = []
    for index in space.chunks(chunk):
        found.append(index[satisfies(space, space.blocks(index), constraints)])
    return np.concatenate(found) if found else np.zeros(0, dtype=np.int64)


# ============================================================================
# Sampling
# ============================================================================


def sample_index(
    indices: np.ndarray, weights: np.ndarray, rng: np.random.Generator
) -> int:
    """Inverse-CDF draw of one index with probability proportional to ``weights``."""
    total = float(np.sum(weights))
    if not total > 0:
        raise CosetEmpty("constrained support has zero mass")
    cdf = np.cumsum(weights)
    k = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
    return int(indices[min(k, len(indices) - 1)])


def sample_rows(probs: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """One inverse-CDF draw per row of a (k, M) table of row distributions."""
    probs = np.asarray(probs, dtype=float)
    cdf = np.cumsum(probs, axis=1)
    u = rng.random(len(probs)) * cdf[:, -1]
    draws = np.sum(cdf <= u[:, None], axis=1)
    return np.minimum(draws, probs.shape[1] - 1)


def first_argmax(weights: np.ndarray, axis: int = -1) -> np.ndarray:
    """Lowest index attaining the maximum, ties within a relative 1e-12."""
    weights = np.asarray(weights, dtype=float)
    top = np.max(weights, axis=axis, keepdims=True)
    return np.argmax(weights >= top * (1 - TIE_RTOL), axis=axis)


def crng_distribution(
    space: BlockSpace,
    table: np.ndarray,
    constraints: Sequence[HashConstraint],
) -> np.ndarray:
    """
    Exact law of the constrained sampler over the whole block space:
    base(z) * 1[constraints hold] / total.

    Raises:
        CosetEmpty: the restricted support has zero mass
    """
    probs = np.zeros(space.size)
    index = coset_indices(space, constraints)
    probs[index] = block_weights(space.blocks(index), table)
    total = probs.sum()
    if not total > 0:
        raise CosetEmpty("constrained support has zero mass")
    return probs / total


def crng_sample(
    space: BlockSpace,
    table: np.ndarray,
    constraints: Sequence[HashConstraint],
    rng: np.random.Generator,
    indices: Optional[np.ndarray] = None,
) -> np.ndarray:
    """
    Draw one block with probability proportional to base(z) restricted to
    the coset fixed by ``constraints``.

    Args:
        space: Block space of the sampled variables
        table: Per-position base law, (M,) or (n, M)
        constraints: Hash constraints defining the coset
        rng: Random generator
        indices: Precomputed coset indices, skipping the enumeration

    Returns:
        (n,) joint symbols of the drawn block

    Raises:
        CosetEmpty: the coset has zero mass under the base law
    """
    if indices is None:
        indices = coset_indices(space, constraints)
    if not len(indices):
        raise CosetEmpty("coset is empty")
    weights = block_weights(space.blocks(indices), table)
    return space.blocks(sample_index(indices, weights, rng))
