# services/codec/__init__.py
"""
Hash-based codes for the interference channel.

Flow:
    hashing (LinearHash) -> blocks (BlockSpace, CRNG sampler)
        -> code (CodeInstance, encode, decode)
        -> evaluate (exact_error, simulate), hash_check
"""

from .blocks import BlockSpace, HashConstraint, crng_distribution, crng_sample
from .code import CodeInstance, code_from_json, decode, encode, transmit
from .evaluate import (
    exact_error,
    rate_conditions,
    simulate,
    source_decoding_error,
    within_budget,
)
from .hash_check import hash_check
from .hashing import LinearHash

__all__ = [
    "BlockSpace",
    "CodeInstance",
    "HashConstraint",
    "LinearHash",
    "code_from_json",
    "crng_distribution",
    "crng_sample",
    "decode",
    "encode",
    "exact_error",
    "hash_check",
    "rate_conditions",
    "simulate",
    "source_decoding_error",
    "transmit",
    "within_budget",
]
