# services/codec/code.py
"""
Code instances built from hash functions, with encoders and decoders that are
constrained random number generators.

Encoding draws one shared block z_S0 from the coset fixed by (f, g)_S0,
then z_Si per encoder given z_S0, then the channel inputs. Decoder j draws
z_Dj from the posterior given its channel output, restricted to the coset
f_Dj = c_Dj, and hashes each component with g.
"""

from dataclasses import dataclass, field
from functools import cached_property
from math import log2
from typing import Dict, List, Mapping, Optional, Sequence, Tuple
import logging

import numpy as np

from icregions.config.families import Family
from icregions.core.channel import AuxInputSpec, ChannelSpec, compose
from icregions.core.prob import JointDistribution
from icregions.exceptions import (
    CosetEmpty,
    DecoderCosetEmpty,
    EncoderError,
    FamilyMismatch,
    ParseError,
    ValidationFailed,
)
from icregions.services.builders.crng import (
    BASE_D,
    BASE_S,
    BASE_S0,
    FULL_D,
    FULL_S,
    FULL_S0,
    Z,
)
from icregions.services.codec.blocks import (
    BLOCK_SPACE_CAP,
    BlockSpace,
    HashConstraint,
    block_weights,
    first_argmax,
    hash_outputs,
    sample_index,
    sample_rows,
)
from icregions.services.codec.hashing import (
    DEFAULT_DEGREE_CONSTANT,
    LinearHash,
    digits_per_symbol,
)

logger = logging.getLogger(__name__)

DECODE_RULES = ("stochastic", "map")
CODE_BITS = 62

Messages = Dict[str, np.ndarray]

INDEX_SETS = {
    Family.CRNG: (BASE_S0, BASE_S, BASE_D),
    Family.CRNG_FULL: (FULL_S0, FULL_S, FULL_D),
}


def vector_code(vectors: np.ndarray, q: int) -> np.ndarray:
    """Integer code of GF(q) vectors, last axis most significant first."""
    vectors = np.asarray(vectors, dtype=np.int64)
    length = vectors.shape[-1]
    if length * log2(q) > CODE_BITS:
        raise ValidationFailed(
            f"{length} hash symbols over GF({q}) are too long to index (max {CODE_BITS} bits)"
        )
    powers = q ** np.arange(length - 1, -1, -1, dtype=np.int64)
    return vectors @ powers if length else np.zeros(vectors.shape[:-1], dtype=np.int64)


@dataclass(frozen=True)
class Stage:
    """The labels drawn together by one encoding step or one decoder."""

    name: str
    labels: Tuple[str, ...]
    space: BlockSpace = field(compare=False)


@dataclass(frozen=True, eq=False)
class CodeInstance:
    """
    One code: per index s a coset hash f_s with label c_s and a message hash
    g_s, over blocks of length n of the input law ``spec``.

    Hash inputs are the base-q digits of the n symbols of Z_s, so f_s and g_s
    take n * ceil(log_q |Z_s|) inputs.
    """

    spec: AuxInputSpec
    channel: ChannelSpec
    n: int
    f: Dict[str, LinearHash]
    g: Dict[str, LinearHash]
    c: Dict[str, np.ndarray]
    q: int = 2
    mode: str = "dense"
    seed: Optional[int] = None
    block_space_cap: int = BLOCK_SPACE_CAP
    _cache: Dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.spec.family not in INDEX_SETS:
            raise FamilyMismatch(
                f"codes need a CRNG or CRNG_FULL input law, got {self.spec.family.value}"
            )
        if self.n < 1:
            raise ValidationFailed(f"block length must be >= 1, got {self.n}")
        labels = set(self.labels)
        for name, table in (("f", self.f), ("g", self.g), ("c", self.c)):
            if set(table) != labels:
                raise ValidationFailed(
                    f"{name} must have one entry per index {sorted(labels)}, got {sorted(table)}"
                )
        self.joint  # raises AlphabetMismatch

        c = {}
        for s in self.labels:
            width = self.n * digits_per_symbol(self.size(s), self.q)
            for name, h in (("f", self.f[s]), ("g", self.g[s])):
                if h.q != self.q:
                    raise ValidationFailed(f"{name}_{s} is over GF({h.q}), code over GF({self.q})")
                if h.n != width:
                    raise ValidationFailed(
                        f"{name}_{s} takes {h.n} inputs, Z{s} blocks have {width} digits"
                    )
            label = np.asarray(self.c[s], dtype=np.int64).reshape(-1)
            if len(label) != self.f[s].l or np.any(label < 0) or np.any(label >= self.q):
                raise ValidationFailed(
                    f"c_{s} must be {self.f[s].l} symbols in 0..{self.q - 1}, got {label.tolist()}"
                )
            label.setflags(write=False)
            c[s] = label
        object.__setattr__(self, "c", c)

    # ------------------------------------------------------------------------
    # Index sets and rates
    # ------------------------------------------------------------------------

    @property
    def s0(self) -> List[str]:
        return list(INDEX_SETS[self.spec.family][0])

    @property
    def s_sets(self) -> Dict[int, List[str]]:
        return {i: list(v) for i, v in INDEX_SETS[self.spec.family][1].items()}

    @property
    def d_sets(self) -> Dict[int, List[str]]:
        return {j: list(v) for j, v in INDEX_SETS[self.spec.family][2].items()}

    @property
    def labels(self) -> List[str]:
        return self.s0 + self.s_sets[1] + self.s_sets[2]

    def size(self, s: str) -> int:
        return self.spec.dist.size_of(f"Z{s}")

    def binning_rate(self, s: str) -> float:
        """r_s = l_f log2(q) / n."""
        return self.f[s].l * log2(self.q) / self.n

    def message_rate(self, s: str) -> float:
        """R_s = l_g log2(q) / n."""
        return self.g[s].l * log2(self.q) / self.n

    def rates(self) -> Dict[str, float]:
        values = {f"R{s}": self.message_rate(s) for s in self.labels}
        values.update({f"r{s}": self.binning_rate(s) for s in self.labels})
        return values

    @property
    def message_count(self) -> int:
        return int(np.prod([self.q ** self.g[s].l for s in self.labels], dtype=np.int64))

    # ------------------------------------------------------------------------
    # Laws
    # ------------------------------------------------------------------------

    @cached_property
    def joint(self) -> JointDistribution:
        return compose(self.spec, self.channel)

    def table(self, names: Sequence[str]) -> np.ndarray:
        """Joint law of ``names`` with axes in that order."""
        return self.joint.marginal(names).reorder(list(names)).probs

    def stage_labels(self, name: str) -> List[str]:
        if name == "S0":
            return self.s0
        if name in ("S1", "S2"):
            return self.s_sets[int(name[1])]
        if name in ("D1", "D2"):
            return self.d_sets[int(name[1])]
        raise ValidationFailed(f"unknown stage {name!r}")

    def stage(self, name: str) -> Stage:
        if name not in self._cache:
            labels = self.stage_labels(name)
            space = BlockSpace([self.size(s) for s in labels], self.n, self.block_space_cap)
            self._cache[name] = Stage(name, tuple(labels), space)
        return self._cache[name]

    def stage_symbols(self, name: str) -> int:
        """Joint per-position alphabet of a stage, without enumerating its blocks."""
        return int(np.prod([self.size(s) for s in self.stage_labels(name)], dtype=np.int64))

    @cached_property
    def common_law(self) -> np.ndarray:
        """mu(z_S0) flattened over the joint S0 symbol."""
        return self.table(Z(*self.s0)).reshape(-1)

    def private_law(self, i: int) -> np.ndarray:
        """mu(z_Si | z_S0) as (M0, Mi); rows of zero-mass z_S0 are zero."""
        key = f"private{i}"
        if key not in self._cache:
            names = Z(*self.s0) + Z(*self.s_sets[i])
            m0 = self.stage_symbols("S0")
            joint = self.table(names).reshape(m0, -1)
            self._cache[key] = _conditional(joint)
        return self._cache[key]

    def input_law(self, i: int) -> np.ndarray:
        """mu(x_i | z_S0, z_Si) as (M0, Mi, |X_i|)."""
        key = f"input{i}"
        if key not in self._cache:
            names = Z(*self.s0) + Z(*self.s_sets[i]) + [f"X{i}"]
            m0, mi = self.stage_symbols("S0"), self.stage_symbols(f"S{i}")
            joint = self.table(names).reshape(m0 * mi, -1)
            self._cache[key] = _conditional(joint).reshape(m0, mi, -1)
        return self._cache[key]

    def decoder_law(self, j: int) -> np.ndarray:
        """mu(z_Dj, y_j) as (M_Dj, |Y_j|)."""
        key = f"decoder{j}"
        if key not in self._cache:
            names = Z(*self.d_sets[j]) + [f"Y{j}"]
            self._cache[key] = self.table(names).reshape(self.stage_symbols(f"D{j}"), -1)
        return self._cache[key]

    # ------------------------------------------------------------------------
    # Cosets
    # ------------------------------------------------------------------------

    def stage_codes(self, name: str, with_messages: bool) -> Tuple[np.ndarray, np.ndarray]:
        """
        Integer codes of (f outputs, g outputs) of every block of a stage, in
        lexicographic order. g codes are zero when ``with_messages`` is False.
        """
        key = f"codes{name}{with_messages}"
        if key not in self._cache:
            stage = self.stage(name)
            f_codes, g_codes = [], []
            for index in stage.space.chunks():
                blocks = stage.space.blocks(index)
                f_codes.append(vector_code(self._outputs(stage, blocks, self.f), self.q))
                if with_messages:
                    g_codes.append(vector_code(self._outputs(stage, blocks, self.g), self.q))
                else:
                    g_codes.append(np.zeros(len(index), dtype=np.int64))
            self._cache[key] = (np.concatenate(f_codes), np.concatenate(g_codes))
        return self._cache[key]

    def _outputs(self, stage: Stage, blocks: np.ndarray, hashes: Dict[str, LinearHash]) -> np.ndarray:
        parts = [
            hash_outputs(stage.space, blocks, v, hashes[s]) for v, s in enumerate(stage.labels)
        ]
        return np.concatenate(parts, axis=1)

    def coset_code(self, labels: Sequence[str], vectors: Mapping[str, np.ndarray]) -> int:
        parts = [np.asarray(vectors[s], dtype=np.int64).reshape(-1) for s in labels]
        return int(vector_code(np.concatenate(parts) if parts else np.zeros(0), self.q))

    def encoder_coset(self, name: str, messages: Messages) -> np.ndarray:
        stage = self.stage(name)
        f_codes, g_codes = self.stage_codes(name, with_messages=True)
        target_f = self.coset_code(stage.labels, self.c)
        target_g = self.coset_code(stage.labels, messages)
        return np.flatnonzero((f_codes == target_f) & (g_codes == target_g))

    def decoder_coset(self, j: int) -> np.ndarray:
        key = f"coset{j}"
        if key not in self._cache:
            stage = self.stage(f"D{j}")
            f_codes, _ = self.stage_codes(stage.name, with_messages=False)
            self._cache[key] = np.flatnonzero(f_codes == self.coset_code(stage.labels, self.c))
        return self._cache[key]

    def constraints(self, name: str, messages: Optional[Messages] = None) -> List[HashConstraint]:
        """Hash constraints of a stage, in the form the generic sampler takes."""
        stage = self.stage(name)
        found = []
        for v, s in enumerate(stage.labels):
            found.append(HashConstraint(v, self.f[s], tuple(self.c[s].tolist())))
            if messages is not None:
                found.append(
                    HashConstraint(v, self.g[s], tuple(np.asarray(messages[s]).tolist()))
                )
        return found

    def prepare(self) -> "CodeInstance":
        """Fill every lazy table so worker threads only read shared state."""
        for name in ("S0", "S1", "S2"):
            self.stage_codes(name, with_messages=True)
        for k in (1, 2):
            self.private_law(k)
            self.input_law(k)
            self.decoder_law(k)
            self.decoder_coset(k)
        self.common_law
        return self

    # ------------------------------------------------------------------------
    # Messages
    # ------------------------------------------------------------------------

    def random_messages(self, rng: np.random.Generator) -> Messages:
        return {s: rng.integers(0, self.q, size=self.g[s].l) for s in self.labels}

    def check_messages(self, messages: Mapping[str, np.ndarray]) -> Messages:
        checked = {}
        for s in self.labels:
            if s not in messages:
                raise ValidationFailed(f"missing message for index {s}")
            m = np.asarray(messages[s], dtype=np.int64).reshape(-1)
            if len(m) != self.g[s].l or np.any(m < 0) or np.any(m >= self.q):
                raise ValidationFailed(
                    f"message {s} must be {self.g[s].l} symbols in 0..{self.q - 1}, got {m.tolist()}"
                )
            checked[s] = m
        return checked

    def message_of(self, name: str, block: np.ndarray) -> Messages:
        stage = self.stage(name)
        blocks = np.asarray(block, dtype=np.int64).reshape(1, -1)
        return {
            s: hash_outputs(stage.space, blocks, v, self.g[s])[0]
            for v, s in enumerate(stage.labels)
        }

    # ------------------------------------------------------------------------
    # Construction and JSON
    # ------------------------------------------------------------------------

    @classmethod
    def random(
        cls,
        spec: AuxInputSpec,
        channel: ChannelSpec,
        lengths: Mapping[str, Tuple[int, int]],
        n: int,
        q: int = 2,
        mode: str = "dense",
        seed: Optional[int] = None,
        c: float = DEFAULT_DEGREE_CONSTANT,
        block_space_cap: int = BLOCK_SPACE_CAP,
    ) -> "CodeInstance":
        """
        Draw hashes and coset labels for every index.

        Args:
            spec: CRNG or CRNG_FULL input law
            channel: Channel
            lengths: Index -> (l_f, l_g); missing indices get (0, 0)
            n: Block length
            q: Field order
            mode: Hash ensemble, "dense" or "sparse"
            seed: Seed of the draw; a fresh one is recorded when None
            c: Column-degree constant of the sparse ensemble

        Returns:
            CodeInstance
        """
        seq = np.random.SeedSequence(seed)
        rng = np.random.default_rng(seq)
        family = spec.family
        if family not in INDEX_SETS:
            raise FamilyMismatch(f"codes need a CRNG or CRNG_FULL input law, got {family.value}")
        s0, s_sets, _ = INDEX_SETS[family]
        labels = list(s0) + list(s_sets[1]) + list(s_sets[2])
        unknown = sorted(set(lengths) - set(labels))
        if unknown:
            raise ValidationFailed(f"lengths given for unknown indices {unknown}; have {labels}")

        f, g, cosets = {}, {}, {}
        for s in labels:
            l_f, l_g = (int(v) for v in lengths.get(s, (0, 0)))
            if l_f < 0 or l_g < 0:
                raise ValidationFailed(f"hash lengths for {s} must be >= 0, got {(l_f, l_g)}")
            width = n * digits_per_symbol(spec.dist.size_of(f"Z{s}"), q)
            hash_mode = mode if width else "dense"
            f[s] = LinearHash.random(width, l_f, q, hash_mode, rng, c)
            g[s] = LinearHash.random(width, l_g, q, hash_mode, rng, c)
            cosets[s] = rng.integers(0, q, size=l_f)
        code = cls(spec, channel, n, f, g, cosets, q, mode, int(seq.entropy), block_space_cap)
        logger.debug(f"drew {mode} code n={n} q={q} rates={code.rates()}")
        return code

    def to_json(self) -> Dict:
        return {
            "n": self.n,
            "q": self.q,
            "mode": self.mode,
            "seed": self.seed,
            "input": self.spec.to_json(),
            "channel": self.channel.to_json(),
            "hashes": {
                s: {"f": self.f[s].to_json(), "g": self.g[s].to_json(), "c": self.c[s].tolist()}
                for s in self.labels
            },
        }

    @classmethod
    def from_json(cls, data: Dict, block_space_cap: int = BLOCK_SPACE_CAP) -> "CodeInstance":
        try:
            spec = AuxInputSpec.from_json(data["input"])
            channel = ChannelSpec.from_json(data["channel"])
            hashes = data["hashes"]
            f = {s: LinearHash.from_json(h["f"]) for s, h in hashes.items()}
            g = {s: LinearHash.from_json(h["g"]) for s, h in hashes.items()}
            c = {s: np.asarray(h["c"], dtype=np.int64) for s, h in hashes.items()}
            n, q = int(data["n"]), int(data.get("q", 2))
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise ParseError(f"malformed code JSON: {exc}") from exc
        seed = data.get("seed")
        return cls(
            spec, channel, n, f, g, c, q, data.get("mode", "dense"),
            None if seed is None else int(seed), block_space_cap,
        )


def _conditional(joint: np.ndarray) -> np.ndarray:
    totals = joint.sum(axis=1, keepdims=True)
    return np.divide(joint, totals, out=np.zeros_like(joint), where=totals > 0)


def code_from_json(
    data: Dict, seed: Optional[int] = None, block_space_cap: int = BLOCK_SPACE_CAP
) -> CodeInstance:
    """
    Load a serialized code, or draw one from generator parameters:
    {"n", "q", "mode", "c", "input", "channel", "rates": {s: {"l_f", "l_g"}}}.
    """
    if "hashes" in data:
        return CodeInstance.from_json(data, block_space_cap)
    try:
        spec = AuxInputSpec.from_json(data["input"])
        channel = ChannelSpec.from_json(data["channel"])
        lengths = {
            str(s): (int(v.get("l_f", 0)), int(v.get("l_g", 0)))
            for s, v in data.get("rates", {}).items()
        }
        n = int(data["n"])
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise ParseError(f"malformed code parameters: {exc}") from exc
    return CodeInstance.random(
        spec,
        channel,
        lengths,
        n,
        q=int(data.get("q", 2)),
        mode=data.get("mode", "dense"),
        seed=seed if seed is not None else data.get("seed"),
        c=float(data.get("c", DEFAULT_DEGREE_CONSTANT)),
        block_space_cap=block_space_cap,
    )


# ============================================================================
# Encoding and decoding
# ============================================================================


def encode(
    code: CodeInstance, messages: Mapping[str, np.ndarray], rng: np.random.Generator
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Map messages to the two channel-input blocks.

    Args:
        code: Code instance
        messages: Index -> message vector of length l_g
        rng: Random generator driving every draw

    Returns:
        (x1, x2) blocks of length n

    Raises:
        EncoderError: the coset of stage "S0", "S1" or "S2" has zero mass
    """
    messages = code.check_messages(messages)
    s0 = code.stage("S0")
    try:
        index = sample_index(*_weighted(code, "S0", messages, code.common_law), rng)
    except CosetEmpty:
        raise EncoderError("S0")
    z0 = s0.space.blocks(index)

    inputs = []
    for i in (1, 2):
        name = f"S{i}"
        si = code.stage(name)
        table = code.private_law(i)[z0]
        try:
            index = sample_index(*_weighted(code, name, messages, table), rng)
        except CosetEmpty:
            raise EncoderError(name)
        zi = si.space.blocks(index)
        inputs.append(sample_rows(code.input_law(i)[z0, zi], rng))
    return inputs[0], inputs[1]


def _weighted(
    code: CodeInstance, name: str, messages: Messages, table: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    indices = code.encoder_coset(name, messages)
    if not len(indices):
        raise CosetEmpty(f"stage {name} coset is empty")
    space = code.stage(name).space
    return indices, block_weights(space.blocks(indices), table)


def transmit(
    code: CodeInstance, x1: np.ndarray, x2: np.ndarray, rng: np.random.Generator
) -> Tuple[np.ndarray, np.ndarray]:
    """Pass the input blocks through the memoryless channel."""
    w = code.channel.w
    rows = w[np.asarray(x1), np.asarray(x2)].reshape(len(x1), -1)
    joint = sample_rows(rows, rng)
    return joint // w.shape[3], joint % w.shape[3]


def decode(
    code: CodeInstance,
    j: int,
    y: np.ndarray,
    rng: Optional[np.random.Generator] = None,
    rule: str = "stochastic",
) -> Messages:
    """
    Reproduce the messages of D_j from the output block of decoder j.

    Args:
        code: Code instance
        j: Decoder index (1 or 2)
        y: Output block of length n
        rng: Random generator; unused by the arg-max rule
        rule: "stochastic" samples the constrained posterior, "map" takes its
            lexicographically first maximizer

    Returns:
        Index -> message estimate, for every index of D_j

    Raises:
        DecoderCosetEmpty: the coset has zero posterior mass
    """
    if rule not in DECODE_RULES:
        raise ValidationFailed(f"unknown decoding rule {rule!r}; expected {DECODE_RULES}")
    if j not in (1, 2):
        raise ValidationFailed(f"decoder index must be 1 or 2, got {j}")
    y = np.asarray(y, dtype=np.int64).reshape(-1)
    if len(y) != code.n:
        raise ValidationFailed(f"output block must have length {code.n}, got {len(y)}")

    name = f"D{j}"
    space = code.stage(name).space
    indices = code.decoder_coset(j)
    # per-position table mu(z, y_t) over the joint D_j symbol
    table = code.decoder_law(j)[:, y].T
    weights = block_weights(space.blocks(indices), table) if len(indices) else np.zeros(0)
    if not np.sum(weights) > 0:
        raise DecoderCosetEmpty(j)
    if rule == "map":
        index = int(indices[first_argmax(weights)])
    else:
        if rng is None:
            raise ValidationFailed("the stochastic decoder needs a random generator")
        index = sample_index(indices, weights, rng)
    return code.message_of(name, space.blocks(index))
