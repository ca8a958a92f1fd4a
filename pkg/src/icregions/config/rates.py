# config/rates.py
"""
Rate-variable vocabulary, region variants and named slices.
"""

from typing import Dict, Tuple

from icregions.config.families import Family

RATE_VOCABULARY = (
    "R00",
    "R01",
    "R02",
    "R10",
    "R11",
    "R12",
    "R20",
    "R22",
    "R21",
    "R0",
    "R1",
    "R2",
)
AUX_VOCABULARY = tuple("r" + name[1:] for name in RATE_VOCABULARY[:9])

# Survivors of a slice are renamed only when nothing outside these remains.
SLICE_RENAMES: Dict[str, str] = {"R00": "R0", "R11": "R1", "R22": "R2"}

# variant -> family of the input spec it is built from
VARIANT_FAMILIES: Dict[str, Family] = {
    "hk": Family.HK,
    "hk-reduced": Family.HK,
    "cmg": Family.CMG,
    "jxg-raw": Family.CMG,
    "jxg-reduced": Family.CMG,
    "crng-base": Family.CRNG,
    "crng-full": Family.CRNG_FULL,
    "crng-tilde": Family.CRNG,
    "crng-eliminated0": Family.CRNG,
}

_SPLIT = ("R10", "R20")
_CROSS = ("R01", "R02", "R12", "R21")

# two-rate slice of every variant over (R1, R2), used by boundary sweeps
SWEEP_SLICES: Dict[str, str] = {
    "hk": "00",
    "hk-reduced": "none",
    "cmg": "none",
    "jxg-raw": "00",
    "jxg-reduced": "00",
    "crng-base": "00",
    "crng-full": "000",
    "crng-tilde": "00",
    "crng-eliminated0": "00",
}

SLICE_TABLE: Dict[str, Dict[str, Tuple[str, ...]]] = {
    "hk": {"none": (), "0": _SPLIT, "00": _SPLIT},
    "hk-reduced": {"none": ()},
    "cmg": {"none": ()},
    "jxg-raw": {"none": (), "0": _SPLIT, "00": _SPLIT + ("R00",)},
    "jxg-reduced": {"none": (), "0": (), "00": ("R0",)},
    "crng-base": {"none": (), "0": _SPLIT, "00": _SPLIT + ("R00",)},
    "crng-full": {
        "none": (),
        "0": _CROSS,
        "00": _CROSS + _SPLIT,
        "000": _CROSS + _SPLIT + ("R00",),
    },
    "crng-tilde": {"none": (), "0": (), "00": ("R0",)},
    "crng-eliminated0": {"none": (), "0": (), "00": ("R0",)},
}
