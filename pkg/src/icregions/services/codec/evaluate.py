# services/codec/evaluate.py
"""
Error probability of code instances: exact enumeration at desk scale, Monte
Carlo simulation with per-trial seeds, and the rate conditions a code's
(r_s, R_s) must meet.
"""

from concurrent.futures import ThreadPoolExecutor
from itertools import product
from typing import Dict, List, Optional, Tuple
import logging

import numpy as np
import pandas as pd

from icregions.core.prob import EntropyOracle
from icregions.exceptions import (
    DecoderCosetEmpty,
    EncoderError,
    SupportTooLarge,
    ValidationFailed,
)
from icregions.models.reports import SimResult
from icregions.services.builders.crng import index_set_bounds
from icregions.services.codec.blocks import block_weights, first_argmax
from icregions.services.codec.code import (
    DECODE_RULES,
    CodeInstance,
    Messages,
    decode,
    encode,
    transmit,
)

logger = logging.getLogger(__name__)

EXACT_STATE_CAP = 2**26
TRIVIAL_TOL = 1e-12


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Counter-based stream of one trial, independent of every other trial."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(trial,))))


def _check_rule(rule: str) -> None:
    if rule not in DECODE_RULES:
        raise ValidationFailed(f"unknown decoding rule {rule!r}; expected {DECODE_RULES}")


# ============================================================================
# Decoder tables
# ============================================================================


def _output_blocks(size: int, n: int) -> np.ndarray:
    return np.stack(np.unravel_index(np.arange(size**n), (size,) * n), axis=-1)


def _likelihoods(table: np.ndarray, blocks: np.ndarray, outputs: np.ndarray) -> np.ndarray:
    """L[y, z] = prod_t table[z_t, y_t] for every output block y and block z."""
    L = np.ones((len(outputs), len(blocks)))
    for t in range(blocks.shape[1]):
        L *= table[blocks[:, t]][:, outputs[:, t]].T
    return L


def _grouped(L: np.ndarray, keys: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """
    Columns of L grouped by key.

    Returns:
        (unique keys, per-group sums, per-group maxima, group of each column)
    """
    order = np.argsort(keys, kind="stable")
    sorted_keys = keys[order]
    starts = np.concatenate([[0], np.flatnonzero(np.diff(sorted_keys)) + 1])
    sums = np.add.reduceat(L[:, order], starts, axis=1)
    maxima = np.maximum.reduceat(L[:, order], starts, axis=1)
    group = np.empty(len(keys), dtype=np.int64)
    group[order] = np.repeat(np.arange(len(starts)), np.diff(np.append(starts, len(keys))))
    return sorted_keys[starts], sums, maxima, group


def _decoder_success(
    code: CodeInstance, j: int, rule: str, cap: int
) -> Tuple[np.ndarray, Dict[int, int]]:
    """
    Probability that decoder j returns each message of D_j, per output block.

    Returns:
        (C, column) with C[y, k] the probability of returning the message
        whose code maps to column k
    """
    name = f"D{j}"
    stage = code.stage(name)
    indices = code.decoder_coset(j)
    table = code.decoder_law(j)
    y_size = table.shape[1]
    y_blocks = y_size**code.n
    if y_blocks * max(len(indices), 1) > cap:
        raise SupportTooLarge(
            f"decoder {j}: {y_blocks} output blocks x {len(indices)} coset blocks exceeds cap {cap}"
        )
    outputs = _output_blocks(y_size, code.n)
    if not len(indices):
        return np.zeros((y_blocks, 0)), {}

    L = _likelihoods(table, stage.space.blocks(indices), outputs)
    _, g_codes = code.stage_codes(name, with_messages=True)
    keys, sums, _, group = _grouped(L, g_codes[indices])
    totals = L.sum(axis=1)
    column = {int(k): c for c, k in enumerate(keys)}

    if rule == "stochastic":
        success = np.divide(sums, totals[:, None], out=np.zeros_like(sums), where=totals[:, None] > 0)
    else:
        best = first_argmax(L, axis=1)
        success = np.zeros_like(sums)
        live = totals > 0
        success[np.flatnonzero(live), group[best[live]]] = 1.0
    return success, column


# ============================================================================
# Exact error
# ============================================================================


def exact_error(
    code: CodeInstance, rule: str = "stochastic", cap: int = EXACT_STATE_CAP
) -> float:
    """
    Exact probability that some decoder misses some message of its D_j,
    averaged over uniform messages, every encoder draw and the channel.

    Encoder failures count as errors. The two decoders use independent
    randomness given their outputs.

    Args:
        code: Code instance
        rule: Decoding rule, "stochastic" or "map"
        cap: Largest number of weighted states

    Returns:
        Error probability

    Raises:
        SupportTooLarge: the enumeration exceeds ``cap``
    """
    _check_rule(rule)
    n, q = code.n, code.q
    m0 = code.stage_symbols("S0")
    m12 = code.stage_symbols("S1") * code.stage_symbols("S2")
    y1, y2 = code.channel.y1, code.channel.y2
    states = code.message_count * m0**n * max(m12, y1 * y2) ** n
    if states > cap:
        raise SupportTooLarge(f"exact error needs {states} weighted states, cap {cap}")

    success = {j: _decoder_success(code, j, rule, cap) for j in (1, 2)}
    kernel = _channel_kernel(code)

    labels = code.labels
    choices = [list(product(range(q), repeat=code.g[s].l)) for s in labels]
    correct = 0.0
    for combo in product(*choices):
        messages = {s: np.asarray(m, dtype=np.int64) for s, m in zip(labels, combo)}
        outputs = _output_law(code, messages, kernel)
        if outputs is None:
            continue
        c1 = _success_column(code, success[1], 1, messages)
        c2 = _success_column(code, success[2], 2, messages)
        correct += float(c1 @ outputs @ c2)
    error = 1.0 - correct / code.message_count
    logger.info(f"exact {rule} error {error:.6g} over {code.message_count} messages (n={n})")
    return min(max(error, 0.0), 1.0)


def _success_column(
    code: CodeInstance, success: Tuple[np.ndarray, Dict[int, int]], j: int, messages: Messages
) -> np.ndarray:
    table, column = success
    key = code.coset_code(code.d_sets[j], messages)
    if key not in column:
        return np.zeros(table.shape[0])
    return table[:, column[key]]


def _channel_kernel(code: CodeInstance) -> np.ndarray:
    """K[s0, s1, s2, y] = P(y1, y2 at one position | z symbols), y joint (y1, y2)."""
    x1 = code.input_law(1)  # (M0, M1, X1)
    x2 = code.input_law(2)  # (M0, M2, X2)
    w = code.channel.w.reshape(code.channel.x1, code.channel.x2, -1)
    return np.einsum("abx,acz,xzy->abcy", x1, x2, w)


def _output_law(
    code: CodeInstance, messages: Messages, kernel: np.ndarray
) -> Optional[np.ndarray]:
    """
    P(y1 block, y2 block | messages) as a (|Y1|^n, |Y2|^n) matrix, missing
    the mass of encoder failures; None when stage S0 fails outright.
    """
    n = code.n
    s0 = code.stage("S0")
    indices = code.encoder_coset("S0", messages)
    if not len(indices):
        return None
    weights = block_weights(s0.space.blocks(indices), code.common_law)
    total = weights.sum()
    if not total > 0:
        return None

    m1, m2 = code.stage_symbols("S1"), code.stage_symbols("S2")
    y = kernel.shape[-1]
    law = np.zeros((y,) * n)
    for index, weight in zip(indices, weights / total):
        if weight == 0:
            continue
        z0 = s0.space.blocks(index)
        p1 = _private_block_law(code, 1, z0, messages)
        p2 = _private_block_law(code, 2, z0, messages)
        if p1 is None or p2 is None:
            continue
        joint = np.multiply.outer(p1.reshape((m1,) * n), p2.reshape((m2,) * n))
        # interleave to (s1_0, s2_0, s1_1, s2_1, ...) and merge each pair
        axes = [a for t in range(n) for a in (t, n + t)]
        tensor = joint.transpose(axes).reshape((m1 * m2,) * n)
        for t in range(n):
            step = kernel[z0[t]].reshape(m1 * m2, y)
            tensor = np.tensordot(tensor, step, axes=([0], [0]))
        law += weight * tensor

    y1, y2 = code.channel.y1, code.channel.y2
    law = law.reshape((y1, y2) * n)
    axes = [2 * t for t in range(n)] + [2 * t + 1 for t in range(n)]
    return law.transpose(axes).reshape(y1**n, y2**n)


def _private_block_law(
    code: CodeInstance, i: int, z0: np.ndarray, messages: Messages
) -> Optional[np.ndarray]:
    name = f"S{i}"
    space = code.stage(name).space
    indices = code.encoder_coset(name, messages)
    if not len(indices):
        return None
    weights = block_weights(space.blocks(indices), code.private_law(i)[z0])
    total = weights.sum()
    if not total > 0:
        return None
    law = np.zeros(space.size)
    law[indices] = weights / total
    return law


def source_decoding_error(
    code: CodeInstance, j: int, rule: str = "stochastic", cap: int = EXACT_STATE_CAP
) -> float:
    """
    Exact error of decoder j in the source-coding setting: z_Dj drawn i.i.d.
    from the input law, y_j through the channel, c = f_Dj(z_Dj), and an
    error whenever the reproduced block differs from z_Dj.

    The stochastic rule's error is at most twice the arg-max rule's.
    """
    _check_rule(rule)
    name = f"D{j}"
    stage = code.stage(name)
    table = code.decoder_law(j)
    y_size = table.shape[1]
    if y_size**code.n * stage.space.size > cap:
        raise SupportTooLarge(
            f"source decoding of D{j} needs {y_size**code.n * stage.space.size} states, cap {cap}"
        )
    blocks = stage.space.blocks(np.arange(stage.space.size))
    L = _likelihoods(table, blocks, _output_blocks(y_size, code.n))
    f_codes, _ = code.stage_codes(name, with_messages=False)
    _, sums, maxima, group = _grouped(L, f_codes)

    if rule == "map":
        correct = maxima.sum()
    else:
        denominators = sums[:, group]
        correct = np.sum(np.divide(L * L, denominators, out=np.zeros_like(L), where=denominators > 0))
    return float(min(max(1.0 - correct, 0.0), 1.0))


# ============================================================================
# Simulation
# ============================================================================


def run_trial(
    code: CodeInstance, seed: int, trial: int, rule: str = "stochastic"
) -> Tuple[bool, str]:
    """
    One draw-messages, encode, transmit, decode round.

    Returns:
        (failed, stage) with stage "encoder", "decoder", "mismatch" or ""
    """
    rng = trial_rng(seed, trial)
    messages = code.random_messages(rng)
    try:
        x1, x2 = encode(code, messages, rng)
    except EncoderError as exc:
        logger.debug(f"trial {trial}: encoder failed at {exc.stage}")
        return True, "encoder"
    y1, y2 = transmit(code, x1, x2, rng)
    mismatch = False
    for j, y in ((1, y1), (2, y2)):
        try:
            estimate = decode(code, j, y, rng, rule)
        except DecoderCosetEmpty:
            return True, "decoder"
        if any(not np.array_equal(estimate[s], messages[s]) for s in code.d_sets[j]):
            mismatch = True
    return mismatch, "mismatch" if mismatch else ""


def simulate(
    code: CodeInstance,
    trials: int,
    seed: Optional[int] = None,
    rule: str = "stochastic",
    workers: int = 1,
    confidence: float = 0.95,
) -> SimResult:
    """
    Monte Carlo estimate of the error probability.

    Trial t draws everything from its own counter-based stream keyed by
    (seed, t), so results do not depend on ``workers`` and two codes
    simulated with the same seed share message and noise draws.

    Args:
        code: Code instance
        trials: Number of trials (>= 1)
        seed: Master seed; a fresh one is drawn and recorded when None
        rule: Decoding rule
        workers: Threads sharing the trials

    Returns:
        SimResult
    """
    if trials < 1:
        raise ValidationFailed(f"trials must be >= 1, got {trials}")
    _check_rule(rule)
    seed = int(np.random.SeedSequence(seed).entropy)

    def batch(bounds: Tuple[int, int]) -> SimResult:
        counts = {"encoder": 0, "decoder": 0, "mismatch": 0}
        for trial in range(*bounds):
            failed, stage = run_trial(code, seed, trial, rule)
            if failed:
                counts[stage] += 1
        errors = sum(counts.values())
        return SimResult(
            trials=bounds[1] - bounds[0],
            errors=errors,
            encoder_errors=counts["encoder"],
            decoder_errors=counts["decoder"],
            seed=seed,
            confidence=confidence,
        )

    code.prepare()

    workers = max(1, min(workers, trials))
    edges = np.linspace(0, trials, workers + 1).astype(int)
    spans = [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]
    if workers == 1:
        parts = [batch(span) for span in spans]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(batch, spans))

    result = parts[0]
    for part in parts[1:]:
        result = result.merge(part)
    logger.info(
        f"simulated {result.trials} trials: {result.errors} errors "
        f"(encoder {result.encoder_errors}, decoder {result.decoder_errors}), seed {seed}"
    )
    return result


# ============================================================================
# Rate conditions
# ============================================================================


def rate_conditions(code: CodeInstance) -> pd.DataFrame:
    """
    Margins of the code's (r_s, R_s) against the index-set conditions on
    its input law and channel. A positive margin means the condition holds
    strictly. Subsets of constant variables at zero rate are trivial and
    always hold.
    """
    oracle = EntropyOracle(code.joint)
    rates = code.rates()
    rows: List[Dict] = []
    for kind, index, subset, bound in index_set_bounds(
        oracle, code.s0, code.s_sets, code.d_sets
    ):
        if kind == "D":
            lhs = sum(rates[f"r{s}"] for s in subset)
            margin = lhs - bound
        else:
            lhs = sum(rates[f"R{s}"] + rates[f"r{s}"] for s in subset)
            margin = bound - lhs
        trivial = lhs == 0 and abs(bound) <= TRIVIAL_TOL
        rows.append(
            {
                "kind": kind,
                "index": index,
                "subset": ",".join(subset),
                "lhs": lhs,
                "bound": bound,
                "margin": margin,
                "trivial": trivial,
                "holds": margin > 0 or trivial,
            }
        )
    return pd.DataFrame(
        rows,
        columns=["kind", "index", "subset", "lhs", "bound", "margin", "trivial", "holds"],
    )


def within_budget(code: CodeInstance, margin: float = 0.0) -> bool:
    conditions = rate_conditions(code)
    return bool(((conditions["margin"] > margin) | conditions["trivial"]).all())


__all__ = [
    "exact_error",
    "rate_conditions",
    "run_trial",
    "simulate",
    "source_decoding_error",
    "trial_rng",
    "within_budget",
]
