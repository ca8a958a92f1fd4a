# services/codec/hashing.py
"""
Linear hash functions over GF(q): dense uniformly random matrices and sparse
matrices with a fixed number of nonzeros per column.
"""

from dataclasses import dataclass
from math import ceil, isqrt, log2
from typing import Dict, Optional
import logging

import numpy as np

from icregions.exceptions import ParseError, ValidationFailed

logger = logging.getLogger(__name__)

HASH_MODES = ("dense", "sparse")
DEFAULT_DEGREE_CONSTANT = 1.0


def is_prime(q: int) -> bool:
    return q >= 2 and all(q % p for p in range(2, isqrt(q) + 1))


def digits_per_symbol(size: int, q: int) -> int:
    """Number of base-q digits that index an alphabet of ``size`` symbols."""
    count, span = 0, 1
    while span < size:
        span *= q
        count += 1
    return count


def symbol_digits(values: np.ndarray, size: int, q: int) -> np.ndarray:
    """
    Expand symbols of an alphabet of ``size`` into base-q digits, most
    significant first: (..., n) -> (..., n * digits_per_symbol(size, q)).
    """
    values = np.asarray(values, dtype=np.int64)
    k = digits_per_symbol(size, q)
    if k == 0:
        return np.zeros(values.shape[:-1] + (0,), dtype=np.int64)
    powers = q ** np.arange(k - 1, -1, -1, dtype=np.int64)
    digits = (values[..., None] // powers) % q
    return digits.reshape(values.shape[:-1] + (values.shape[-1] * k,))


def sparse_degree(n: int, l: int, c: float = DEFAULT_DEGREE_CONSTANT) -> int:
    """Column degree max(1, ceil(c log2 n)), capped at the number of rows."""
    if l == 0 or n == 0:
        return 0
    d = max(1, ceil(c * log2(n))) if n > 1 else 1
    return min(d, l)


@dataclass(frozen=True, eq=False)
class LinearHash:
    """
    z -> A z over GF(q) with A an l x n matrix.

    Sparse hashes have exactly ``degree`` nonzero entries in every column.
    """

    matrix: np.ndarray
    q: int = 2
    mode: str = "dense"
    degree: Optional[int] = None

    def __post_init__(self):
        if not is_prime(self.q):
            raise ValidationFailed(f"field order must be prime, got {self.q}")
        if self.mode not in HASH_MODES:
            raise ValidationFailed(f"unknown hash mode {self.mode!r}; expected {HASH_MODES}")
        matrix = np.asarray(self.matrix, dtype=np.int64)
        if matrix.ndim != 2:
            raise ValidationFailed(f"hash matrix must be 2-D, got shape {matrix.shape}")
        if np.any(matrix < 0) or np.any(matrix >= self.q):
            raise ValidationFailed(f"hash entries must lie in 0..{self.q - 1}")
        if self.mode == "sparse" and matrix.size:
            weights = np.count_nonzero(matrix, axis=0)
            if self.degree is None or np.any(weights != self.degree):
                raise ValidationFailed(
                    f"sparse hash needs {self.degree} nonzeros per column, got {sorted(set(weights.tolist()))}"
                )
        matrix = matrix.copy()
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    @property
    def n(self) -> int:
        """Input length in GF(q) symbols."""
        return self.matrix.shape[1]

    @property
    def l(self) -> int:
        return self.matrix.shape[0]

    def apply(self, z: np.ndarray) -> np.ndarray:
        """Hash one input (n,) or a batch (k, n); returns (l,) or (k, l)."""
        z = np.asarray(z, dtype=np.int64)
        if z.shape[-1] != self.n:
            raise ValidationFailed(f"hash takes inputs of length {self.n}, got {z.shape[-1]}")
        return (z @ self.matrix.T) % self.q

    def rate(self, block_length: int) -> float:
        return self.l * log2(self.q) / block_length

    @classmethod
    def random(
        cls,
        n: int,
        l: int,
        q: int = 2,
        mode: str = "dense",
        rng: Optional[np.random.Generator] = None,
        c: float = DEFAULT_DEGREE_CONSTANT,
    ) -> "LinearHash":
        """
        Draw one member of the dense or sparse ensemble.

        Args:
            n: Input length
            l: Output length
            q: Field order
            mode: "dense" (i.i.d. uniform entries) or "sparse"
            rng: Random generator
            c: Column-degree constant of the sparse ensemble

        Returns:
            LinearHash
        """
        rng = rng if rng is not None else np.random.default_rng()
        if mode == "dense":
            return cls(rng.integers(0, q, size=(l, n)), q, "dense")
        if mode != "sparse":
            raise ValidationFailed(f"unknown hash mode {mode!r}; expected {HASH_MODES}")
        d = sparse_degree(n, l, c)
        matrix = np.zeros((l, n), dtype=np.int64)
        for col in range(n):
            rows = rng.choice(l, size=d, replace=False)
            matrix[rows, col] = rng.integers(1, q, size=d)
        return cls(matrix, q, "sparse", d)

    # ------------------------------------------------------------------------
    # JSON (rows as bitmasks over GF(2), digit lists otherwise)
    # ------------------------------------------------------------------------

    def to_json(self) -> Dict:
        if self.q == 2:
            rows = [int(sum(int(bit) << k for k, bit in enumerate(row))) for row in self.matrix]
        else:
            rows = self.matrix.tolist()
        return {
            "n": self.n,
            "l": self.l,
            "q": self.q,
            "mode": self.mode,
            "degree": self.degree,
            "rows": rows,
        }

    @classmethod
    def from_json(cls, data: Dict) -> "LinearHash":
        try:
            n, l, q = int(data["n"]), int(data["l"]), int(data.get("q", 2))
            rows = data["rows"]
            if len(rows) != l:
                raise ValueError(f"{len(rows)} rows for l={l}")
            if q == 2:
                matrix = np.array(
                    [[(int(mask) >> k) & 1 for k in range(n)] for mask in rows],
                    dtype=np.int64,
                ).reshape(l, n)
            else:
                matrix = np.asarray(rows, dtype=np.int64).reshape(l, n)
            degree = data.get("degree")
            return cls(matrix, q, data.get("mode", "dense"), None if degree is None else int(degree))
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed hash JSON: {exc}") from exc
