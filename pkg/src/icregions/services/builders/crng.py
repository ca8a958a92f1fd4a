# services/builders/crng.py
"""
Regions achievable with constrained-random-number-generator codes.

- base: rates (R00, R10, R11, R20, R22) with binning rates r_s, one
  inequality per nonempty subset of each encoder / decoder index set
- full: the extended message configuration with cross messages 01, 02, 12, 21
- tilde: the closed form over (R0, R1, R2) without auxiliary rates
- eliminated0: the base region at R10 = R20 = 0 with every r_s projected out
"""

from typing import Dict, Iterator, List, Sequence, Tuple

from icregions.config.families import Family
from icregions.core.prob import EntropyOracle
from icregions.models.system import GEQ, LEQ, LinearInequality
from icregions.services.builders.base_builder import (
    BaseRegionBuilder,
    other,
    rates,
    subsets,
    unit,
)

# ============================================================================
# Index sets
# ============================================================================

BASE_S0 = ["00"]
BASE_S = {1: ["10", "11"], 2: ["20", "22"]}
BASE_D = {1: ["00", "10", "20", "11"], 2: ["00", "10", "20", "22"]}

FULL_S0 = ["00", "01", "02"]
FULL_S = {1: ["10", "11", "12"], 2: ["20", "22", "21"]}
FULL_D = {
    1: ["00", "01", "10", "20", "11", "21"],
    2: ["00", "02", "10", "20", "22", "12"],
}


def Z(*labels: str) -> List[str]:
    return [f"Z{label}" for label in labels]


def index_set_bounds(
    oracle: EntropyOracle,
    s0: Sequence[str],
    s_sets: Dict[int, Sequence[str]],
    d_sets: Dict[int, Sequence[str]],
) -> Iterator[Tuple[str, int, Tuple[str, ...], float]]:
    """
    Entropy constants of the index-set conditions.

    Yields (kind, index, subset, bound) with kind one of
    - "S0": sum over the subset of (R_s + r_s) is at most H(Z_T)
    - "S":  sum over the subset of (R_s + r_s) is at most H(Z_T | Z_S0)
    - "D":  sum over the subset of r_s is at least H(Z_T | Y_j, Z_(D_j minus T))
    """
    for subset in subsets(list(s0)):
        yield "S0", 0, subset, oracle.H(Z(*subset))
    for i, s_i in s_sets.items():
        for subset in subsets(list(s_i)):
            yield "S", i, subset, oracle.H(Z(*subset), Z(*s0))
    for j, d_j in d_sets.items():
        for subset in subsets(list(d_j)):
            rest = [s for s in d_j if s not in subset]
            yield "D", j, subset, oracle.H(Z(*subset), [f"Y{j}"] + Z(*rest))


class _IndexSetRegionBuilder(BaseRegionBuilder):
    s0: List[str]
    s_sets: Dict[int, List[str]]
    d_sets: Dict[int, List[str]]
    tag_prefix: Dict[str, str]

    def labels(self) -> List[str]:
        ordered = list(self.s0)
        for i in (1, 2):
            ordered.extend(self.s_sets[i])
        return ordered

    def rate_vars(self) -> Tuple[str, ...]:
        return tuple(f"R{s}" for s in self.labels())

    def aux_vars(self) -> Tuple[str, ...]:
        return tuple(f"r{s}" for s in self.labels())

    def templates(self) -> Iterator[LinearInequality]:
        bounds = index_set_bounds(self.oracle, self.s0, self.s_sets, self.d_sets)
        for kind, index, subset, bound in bounds:
            members = "{" + ",".join(subset) + "}"
            if kind == "D":
                yield self.ineq(
                    unit(*(f"r{s}" for s in subset)),
                    bound,
                    f"{self.tag_prefix[kind]}[j={index},D={members}]",
                    sense=GEQ,
                )
                continue
            coeffs = unit(*(f"R{s}" for s in subset), *(f"r{s}" for s in subset))
            if kind == "S0":
                tag = self.tag_prefix[kind]
                if len(self.s0) > 1:
                    tag += f"[S={members}]"
            else:
                tag = f"{self.tag_prefix[kind]}[i={index},S={members}]"
            yield self.ineq(coeffs, bound, tag, sense=LEQ)


class CRNGBaseBuilder(_IndexSetRegionBuilder):
    family = Family.CRNG
    name = "crng-base"
    s0 = BASE_S0
    s_sets = BASE_S
    d_sets = BASE_D
    tag_prefix = {"S0": "crng-R0+r0", "S": "crng-sum-Rj+rj", "D": "crng-sum-rj"}


class CRNGFullBuilder(_IndexSetRegionBuilder):
    family = Family.CRNG_FULL
    name = "crng-full"
    s0 = FULL_S0
    s_sets = FULL_S
    d_sets = FULL_D
    tag_prefix = {
        "S0": "crngfull-sum-S0",
        "S": "crngfull-sum-Si",
        "D": "crngfull-sum-Di",
    }


class CRNGTildeBuilder(BaseRegionBuilder):
    """Closed-form region over (R0, R1, R2); eight bounds per user."""

    family = Family.CRNG
    name = "crng-tilde"

    def rate_vars(self) -> Tuple[str, ...]:
        return ("R0", "R1", "R2")

    def templates(self) -> Iterator[LinearInequality]:
        I = self.I
        for i in (1, 2):
            ip = other(i)
            a, b, c, d = f"{i}0", f"{i}{i}", f"{ip}0", f"{ip}{ip}"
            Yi, Yip = f"Y{i}", f"Y{ip}"
            Ri, Rip = f"R{i}", f"R{ip}"
            tag = f"[i={i}]"

            everything_i = I(Z("00", "10", "20", b), [Yi])
            commons_i = I(Z("10", "20", b), [Yi], Z("00"))
            private_i = I(Z(b), [Yi], Z("00", "10", "20"))
            private_ip = I(Z(d), [Yip], Z("00", "10", "20"))
            cross_ip = I(Z(a, d), [Yip], Z("00", c))

            yield self.ineq(unit("R0"), everything_i, "crng-R0" + tag)
            yield self.ineq(unit(Ri), I(Z(a, b), [Yi], Z("00", c)), "crng-Ri" + tag)
            yield self.ineq(unit("R0", Ri), everything_i, "crng-R0+Ri" + tag)
            yield self.ineq(
                unit("R1", "R2"),
                I(Z("20", "11"), ["Y1"], Z("00", "10"))
                + I(Z("10", "22"), ["Y2"], Z("00", "20")),
                "crng-R1+R2-1" + tag,
            )
            yield self.ineq(
                unit("R1", "R2"), commons_i + private_ip, "crng-R1+R2-2" + tag
            )
            yield self.ineq(
                unit("R0", "R1", "R2"), everything_i + private_ip, "crng-R0+R1+R2" + tag
            )
            yield self.ineq(
                rates((Ri, 2.0), (Rip, 1.0)),
                commons_i + private_i + cross_ip,
                "crng-2Ri+Ri'" + tag,
            )
            yield self.ineq(
                rates(("R0", 1.0), (Ri, 2.0), (Rip, 1.0)),
                everything_i + private_i + cross_ip,
                "crng-R0+2Ri+Ri'" + tag,
            )


class CRNGEliminatedBuilder(BaseRegionBuilder):
    """
    The base region sliced at R10 = R20 = 0 with r00, r10, r11, r20, r22
    eliminated in closed form: 37 bounds per user over (R0, R1, R2).
    """

    family = Family.CRNG
    name = "crng-eliminated0"

    def rate_vars(self) -> Tuple[str, ...]:
        return ("R0", "R1", "R2")

    def templates(self) -> Iterator[LinearInequality]:
        for i in (1, 2):
            for k, (coeffs, bound) in enumerate(self._bounds(i)):
                yield self.ineq(coeffs, bound, f"crng-fme{k}[i={i}]")

    def _bounds(self, i: int) -> List[Tuple[Dict[str, float], float]]:
        I = self.I
        ip = other(i)
        a, b, c, d = f"{i}0", f"{i}{i}", f"{ip}0", f"{ip}{ip}"
        Yi, Yip = f"Y{i}", f"Y{ip}"
        Ri, Rip = f"R{i}", f"R{ip}"

        # dependence between the two codewords of one encoder
        hc = I(Z(a), Z(b), Z("00"))
        both = I(Z("10"), Z("11"), Z("00")) + I(Z("20"), Z("22"), Z("00"))

        # terms seen at decoder i
        p = I(Z(b), [Yi] + Z("10", "20"), Z("00"))
        q = I(Z("00", b), [Yi] + Z("10", "20"))
        s = I(Z("00", c, b), [Yi] + Z(a))
        t = I(Z("00", "10", "20", b), [Yi])
        u = I(Z("10", "20", b), [Yi], Z("00"))

        # terms seen at decoder i'
        x = I(Z(a), [Yip] + Z(c, d), Z("00"))
        y = I(Z("00", a), [Yip] + Z(c, d))
        w = I(Z("00", "10", "20"), [Yip] + Z(d))
        v = I(Z(a, d), [Yip] + Z(c), Z("00"))
        g = I(Z("10", "20", d), [Yip], Z("00"))
        e = I(Z("00", a, d), [Yip] + Z(c))
        f = I(Z("00", "10", "20", d), [Yip])

        sum_cross = I(Z("20", "11"), ["Y1"] + Z("10"), Z("00")) + I(
            Z("10", "22"), ["Y2"] + Z("20"), Z("00")
        )
        sum_cross_common = I(Z("00", "20", "11"), ["Y1"] + Z("10")) + I(
            Z("00", "10", "22"), ["Y2"] + Z("20")
        )

        R0 = unit("R0")
        Ri_ = unit(Ri)
        R0Ri = unit("R0", Ri)
        R12 = unit("R1", "R2")
        R0_2_Ri = rates(("R0", 2.0), (Ri, 1.0))
        R0R12 = unit("R0", "R1", "R2")
        R0_2_R12 = rates(("R0", 2.0), ("R1", 1.0), ("R2", 1.0))
        Ri_2_Rip = rates((Ri, 2.0), (Rip, 1.0))
        R0_Ri_2_Rip = rates(("R0", 1.0), (Ri, 2.0), (Rip, 1.0))
        R0_2_Ri_2_Rip = rates(("R0", 2.0), (Ri, 2.0), (Rip, 1.0))
        R0_3_Ri_2_Rip = rates(("R0", 3.0), (Ri, 2.0), (Rip, 1.0))

        return [
            (R0, I(Z("00"), [Yi] + Z("10", "20", b))),
            (R0, I(Z("00", a), [Yi] + Z(c, b))),
            (R0, I(Z("00", c), [Yi] + Z(a, b))),
            (R0, I(Z("00", "10", "20"), [Yi] + Z(b))),
            (Ri_, p),
            (Ri_, I(Z(a, b), [Yi] + Z(c), Z("00"))),
            (Ri_, p + x - hc),
            (R0Ri, q),
            (R0Ri, I(Z("00", a, b), [Yi] + Z(c))),
            (R0Ri, s),
            (R0Ri, t),
            (R0Ri, p + y - hc),
            (R0Ri, p + w - hc),
            (R0Ri, q + x - hc),
            (R0Ri, s + x - hc),
            (R12, p + v - hc),
            (R12, p + g - hc),
            (R12, sum_cross - both),
            (R0_2_Ri, q + y - hc),
            (R0_2_Ri, q + w - hc),
            (R0_2_Ri, s + y - hc),
            (R0_2_Ri, s + w - hc),
            (Ri_2_Rip, u + p + v - both),
            (R0R12, p + e - hc),
            (R0R12, p + f - hc),
            (R0R12, q + v - hc),
            (R0R12, q + g - hc),
            (R0R12, s + v - both),
            (R0_2_R12, q + e - hc),
            (R0_2_R12, q + f - hc),
            (R0_2_R12, s + f - hc),
            (R0_2_R12, sum_cross_common - both),
            (R0_Ri_2_Rip, u + p + e - both),
            (R0_Ri_2_Rip, t + p + v - both),
            (R0_2_Ri_2_Rip, t + p + e - both),
            (R0_2_Ri_2_Rip, t + q + v - both),
            (R0_3_Ri_2_Rip, t + q + e - both),
        ]
