# services/codec/hash_check.py
"""
Collision census of linear hash ensembles.

For a linear hash, f(z) = f(z') iff f(z - z') = 0, so the collision
probability of a pair depends only on its difference d. The census reports
p(d) = Pr_F[F d = 0] for every nonzero d (or a sample of them), its ratio to
q^-l, and the (alpha, beta) profile: alpha_hat is the worst ratio and
beta_hat sums p(d) over the differences whose ratio exceeds 1.
"""

from itertools import combinations, product
from math import comb
from typing import Optional, Tuple
import logging

import numpy as np
import pandas as pd
from scipy.stats import norm

from icregions.exceptions import SupportTooLarge, ValidationFailed
from icregions.models.reports import HashProfile
from icregions.services.codec.hashing import (
    DEFAULT_DEGREE_CONSTANT,
    HASH_MODES,
    LinearHash,
    is_prime,
    sparse_degree,
)

logger = logging.getLogger(__name__)

ENSEMBLE_CAP = 2**24
CENSUS_CAP = 2**26
MAX_DIFFERENCES = 4096
CHUNK = 1024
SIGNIFICANCE = 1e-3
EXACT_TOL = 1e-12
COMPOSITION_TOL = 0.02


# ============================================================================
# Ensembles
# ============================================================================


def ensemble_size(mode: str, n: int, l: int, q: int, c: float = DEFAULT_DEGREE_CONSTANT) -> int:
    if mode == "dense":
        return q ** (l * n)
    d = sparse_degree(n, l, c)
    return (comb(l, d) * (q - 1) ** d) ** n


def enumerate_ensemble(
    mode: str, n: int, l: int, q: int = 2, c: float = DEFAULT_DEGREE_CONSTANT
) -> np.ndarray:
    """Every matrix of the ensemble, each equally likely: (count, l, n)."""
    size = ensemble_size(mode, n, l, q, c)
    if size > ENSEMBLE_CAP:
        raise SupportTooLarge(f"{mode} ensemble ({n}x{l} over GF({q})) has {size} members, cap {ENSEMBLE_CAP}")
    if l == 0:
        return np.zeros((1, 0, n), dtype=np.int64)
    if mode == "dense":
        digits = np.stack(np.unravel_index(np.arange(size), (q,) * (l * n)), axis=-1)
        return digits.reshape(size, l, n)

    d = sparse_degree(n, l, c)
    columns = []
    for rows in combinations(range(l), d):
        for values in product(range(1, q), repeat=d):
            col = np.zeros(l, dtype=np.int64)
            col[list(rows)] = values
            columns.append(col)
    columns = np.array(columns, dtype=np.int64).reshape(len(columns), l)
    choice = np.stack(np.unravel_index(np.arange(size), (len(columns),) * n), axis=-1)
    return np.transpose(columns[choice], (0, 2, 1))


def sample_ensemble(
    mode: str, n: int, l: int, q: int, samples: int, rng: np.random.Generator, c: float
) -> np.ndarray:
    return np.stack(
        [LinearHash.random(n, l, q, mode, rng, c).matrix for _ in range(samples)]
    ).reshape(samples, l, n)


def differences(
    n: int, q: int, rng: np.random.Generator, limit: int = MAX_DIFFERENCES
) -> Tuple[np.ndarray, int]:
    """
    Nonzero differences to census: all of them when there are at most
    ``limit``, else ``limit`` distinct random ones.

    Returns:
        (differences (k, n), total number of nonzero differences)
    """
    total = q**n - 1
    if total <= limit:
        index = np.arange(1, total + 1)
    else:
        index = 1 + rng.choice(total, size=limit, replace=False)
        index.sort()
    return np.stack(np.unravel_index(index, (q,) * n), axis=-1), total


# ============================================================================
# Profile
# ============================================================================


def _profile(
    rates: np.ndarray, l: int, q: int, members: int, exact: bool, scale: float
) -> Tuple[float, float, np.ndarray, np.ndarray]:
    """
    (alpha_hat, beta_hat, ratio, significant) of one collision census.

    In sampled mode a ratio counts as above 1 only when it exceeds q^-l by
    more than a simultaneous normal bound over all listed differences.
    """
    base = float(q) ** (-l)
    ratio = rates / base
    if exact:
        significant = ratio > 1 + EXACT_TOL
        shrunk = ratio
    else:
        z = norm.ppf(1 - SIGNIFICANCE / max(len(rates), 1))
        sigma = np.sqrt(base * (1 - base) / members)
        significant = rates > base + z * sigma
        indistinct = np.abs(rates - base) <= z * sigma
        shrunk = np.where(indistinct, 1.0, ratio)
    alpha = float(shrunk.max()) if len(shrunk) else 1.0
    beta = float(rates[significant].sum() * scale)
    return alpha, beta, ratio, significant


def hash_check(
    mode: str = "dense",
    n: int = 8,
    l: int = 2,
    samples: int = 10000,
    seed: Optional[int] = None,
    q: int = 2,
    exact: bool = False,
    c: float = DEFAULT_DEGREE_CONSTANT,
    l_g: Optional[int] = None,
    max_differences: int = MAX_DIFFERENCES,
) -> HashProfile:
    """
    Collision census of the dense or sparse ensemble of l x n matrices.

    Args:
        mode: "dense" or "sparse"
        n: Input length
        l: Output length
        samples: Number of sampled matrices (sampled mode)
        seed: Seed of the matrix and difference draws
        q: Field order
        exact: Enumerate the whole ensemble instead of sampling
        c: Column-degree constant of the sparse ensemble
        l_g: Output length of a second, independent ensemble G; when given,
            the profile also compares the joint ensemble (F, G) with F and G
        max_differences: Largest number of differences to census

    Returns:
        HashProfile
    """
    if mode not in HASH_MODES:
        raise ValidationFailed(f"unknown hash mode {mode!r}; expected {HASH_MODES}")
    if not is_prime(q):
        raise ValidationFailed(f"field order must be prime, got {q}")
    if n < 1 or l < 0 or (l_g is not None and l_g < 0):
        raise ValidationFailed(f"need n >= 1 and l >= 0, got n={n}, l={l}, l_g={l_g}")
    if not exact and samples < 1:
        raise ValidationFailed(f"samples must be >= 1, got {samples}")

    seq = np.random.SeedSequence(seed)
    seed = int(seq.entropy)
    diff_seq, f_seq, g_seq = seq.spawn(3)
    diffs, total = differences(n, q, np.random.default_rng(diff_seq), max_differences)
    scale = total / len(diffs)

    def census(rows: int, stream) -> Tuple[np.ndarray, int]:
        if exact:
            matrices = enumerate_ensemble(mode, n, rows, q, c)
        else:
            matrices = sample_ensemble(mode, n, rows, q, samples, np.random.default_rng(stream), c)
        if len(matrices) * len(diffs) > CENSUS_CAP:
            raise SupportTooLarge(
                f"census of {len(matrices)} matrices x {len(diffs)} differences exceeds cap {CENSUS_CAP}"
            )
        return matrices, len(matrices)

    f_matrices, members = census(l, f_seq)
    f_hits = _hits(f_matrices, diffs, q)
    f_rates = f_hits.mean(axis=0)
    alpha, beta, ratio, significant = _profile(f_rates, l, q, members, exact, scale)

    pairs = pd.DataFrame(
        {
            "difference": ["".join(str(int(v)) for v in d) for d in diffs],
            "weight": np.count_nonzero(diffs, axis=1),
            "collision": f_rates,
            "ratio": ratio,
            "above": significant,
        }
    )

    composition = None
    if l_g is not None:
        g_matrices, g_members = census(l_g, g_seq)
        g_hits = _hits(g_matrices, diffs, q)
        g_rates = g_hits.mean(axis=0)
        if exact:
            fg_hits, fg_members = _joint_hits(f_matrices, g_matrices, diffs, q)
        else:
            # member k of F is paired with member k of G
            fg_hits, fg_members = f_hits & g_hits, members
        fg_rates = fg_hits.mean(axis=0)
        alpha_g, beta_g, _, _ = _profile(g_rates, l_g, q, g_members, exact, scale)
        alpha_fg, beta_fg, _, _ = _profile(fg_rates, l + l_g, q, fg_members, exact, scale)
        product_alpha = alpha * alpha_g
        composition = {
            "alpha_f": alpha,
            "alpha_g": alpha_g,
            "alpha_fg": alpha_fg,
            "joint_members": fg_members,
            "alpha_product": product_alpha,
            "relative_error": abs(alpha_fg - product_alpha) / product_alpha,
            "beta_f": beta,
            "beta_g": beta_g,
            "beta_fg": beta_fg,
            "holds": abs(alpha_fg - product_alpha) <= COMPOSITION_TOL * product_alpha,
        }

    profile = HashProfile(
        mode=mode,
        n=n,
        l=l,
        q=q,
        samples=members,
        seed=seed,
        exact=exact,
        alpha_hat=alpha,
        beta_hat=beta,
        pairs=pairs,
        composition=composition,
    )
    logger.info(
        f"hash census {mode} n={n} l={l} q={q} ({'exact' if exact else f'{members} samples'}): "
        f"alpha={alpha:.4g} beta={beta:.4g}"
    )
    return profile


def _joint_hits(
    f_matrices: np.ndarray, g_matrices: np.ndarray, diffs: np.ndarray, q: int
) -> Tuple[np.ndarray, int]:
    """Hits of every stacked pair [F; G] of the two enumerated ensembles."""
    members = len(f_matrices) * len(g_matrices)
    if members > ENSEMBLE_CAP or members * len(diffs) > CENSUS_CAP:
        raise SupportTooLarge(
            f"joint census of {members} pairs x {len(diffs)} differences exceeds cap {CENSUS_CAP}"
        )
    stacked = np.concatenate(
        [
            np.repeat(f_matrices, len(g_matrices), axis=0),
            np.tile(g_matrices, (len(f_matrices), 1, 1)),
        ],
        axis=1,
    )
    return _hits(stacked, diffs, q), members


def _hits(matrices: np.ndarray, diffs: np.ndarray, q: int) -> np.ndarray:
    """(members, k) booleans: member m maps difference k to zero."""
    if matrices.shape[1] == 0:
        return np.ones((len(matrices), len(diffs)), dtype=bool)
    hits = np.empty((len(matrices), len(diffs)), dtype=bool)
    for start in range(0, len(matrices), CHUNK):
        images = np.einsum("mln,kn->mlk", matrices[start : start + CHUNK], diffs) % q
        hits[start : start + CHUNK] = np.all(images == 0, axis=1)
    return hits

