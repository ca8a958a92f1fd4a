# config/families.py
"""
Variable sets and factorization structure of each auxiliary-input family.
"""

from enum import Enum
from typing import Dict, List, Tuple, TypedDict

from icregions.exceptions import FamilyMismatch


class Family(str, Enum):
    HK = "HK"
    CMG = "CMG"  # shared by the CMG and JXG regions
    CRNG = "CRNG"
    CRNG_FULL = "CRNG_FULL"


FAMILY_ALIASES: Dict[str, Family] = {
    "HK": Family.HK,
    "CMG": Family.CMG,
    "JXG": Family.CMG,
    "CMG/JXG": Family.CMG,
    "CRNG": Family.CRNG,
    "CRNG_FULL": Family.CRNG_FULL,
}


class FamilyConfig(TypedDict):
    """Structure of one family's joint input law."""

    variables: List[str]
    time_sharing: List[str]
    branches: Dict[int, List[str]]
    split_pairs: Dict[int, Tuple[str, str]]
    deterministic_inputs: Dict[int, List[str]]


FAMILY_CONFIGS: Dict[Family, FamilyConfig] = {
    Family.HK: {
        "variables": ["U0", "U10", "U11", "X1", "U20", "U22", "X2"],
        "time_sharing": ["U0"],
        "branches": {1: ["U10", "U11", "X1"], 2: ["U20", "U22", "X2"]},
        # common and private codewords are generated independently given U0
        "split_pairs": {1: ("U10", "U11"), 2: ("U20", "U22")},
        "deterministic_inputs": {1: ["U0", "U10", "U11"], 2: ["U0", "U20", "U22"]},
    },
    Family.CMG: {
        "variables": ["U0", "U1", "X1", "U2", "X2"],
        "time_sharing": ["U0"],
        "branches": {1: ["U1", "X1"], 2: ["U2", "X2"]},
        "split_pairs": {},
        "deterministic_inputs": {},
    },
    Family.CRNG: {
        "variables": ["Z00", "Z10", "Z11", "X1", "Z20", "Z22", "X2"],
        "time_sharing": ["Z00"],
        "branches": {1: ["Z10", "Z11", "X1"], 2: ["Z20", "Z22", "X2"]},
        "split_pairs": {},
        "deterministic_inputs": {},
    },
    Family.CRNG_FULL: {
        "variables": [
            "Z00",
            "Z01",
            "Z02",
            "Z10",
            "Z11",
            "Z12",
            "X1",
            "Z20",
            "Z22",
            "Z21",
            "X2",
        ],
        "time_sharing": ["Z00", "Z01", "Z02"],
        "branches": {1: ["Z10", "Z11", "Z12", "X1"], 2: ["Z20", "Z22", "Z21", "X2"]},
        "split_pairs": {},
        "deterministic_inputs": {},
    },
}

CHANNEL_VARIABLES = ["X1", "X2", "Y1", "Y2"]


def parse_family(name) -> Family:
    if isinstance(name, Family):
        return name
    try:
        return FAMILY_ALIASES[str(name).upper()]
    except KeyError:
        raise FamilyMismatch(
            f"unknown family {name!r}; expected one of {sorted(FAMILY_ALIASES)}"
        )
