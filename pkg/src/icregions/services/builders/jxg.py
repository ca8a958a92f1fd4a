# services/builders/jxg.py
"""
Jiang-Xin-Garg region with a common message: the quintuple (raw) form over
(R00, R10, R11, R20, R22) and the triplet (reduced) form over (R0, R1, R2).
"""

from typing import Iterator, Tuple

from icregions.config.families import Family
from icregions.exceptions import ValidationFailed
from icregions.models.system import LinearInequality
from icregions.services.builders.base_builder import (
    BaseRegionBuilder,
    other,
    rates,
    unit,
)

JXG_FORMS = ("raw", "reduced")


class JXGBuilder(BaseRegionBuilder):
    family = Family.CMG

    def __init__(self, spec, ch, form: str = "reduced", **kwargs):
        if form not in JXG_FORMS:
            raise ValidationFailed(f"unknown JXG form {form!r}; expected {JXG_FORMS}")
        self.form = form
        self.name = f"jxg-{form}"
        super().__init__(spec, ch, **kwargs)

    def rate_vars(self) -> Tuple[str, ...]:
        if self.form == "raw":
            return ("R00", "R10", "R11", "R20", "R22")
        return ("R0", "R1", "R2")

    def templates(self) -> Iterator[LinearInequality]:
        for i in (1, 2):
            if self.form == "raw":
                yield from self._raw(i)
            else:
                yield from self._reduced(i)

    def _raw(self, i: int) -> Iterator[LinearInequality]:
        ip = other(i)
        Ui, Uip, Xi, Yi = f"U{i}", f"U{ip}", f"X{i}", f"Y{i}"
        Ri0, Rii, Rip0 = f"R{i}0", f"R{i}{i}", f"R{ip}0"
        tag = f"[i={i}]"

        yield self.ineq(unit(Rii), self.I([Xi], [Yi], ["U0", "U1", "U2"]), "jxg-Rii" + tag)
        yield self.ineq(
            unit(Ri0, Rii), self.I([Xi], [Yi], ["U0", Uip]), "jxg-Ri0+Rii" + tag
        )
        yield self.ineq(
            unit(Rii, Rip0), self.I([Xi, Uip], [Yi], ["U0", Ui]), "jxg-Rii+Ri'0" + tag
        )
        # The common part of the other user's message is its i'0 component in
        # both of the next two bounds, so they coincide numerically.
        both = self.I([Xi, Uip], [Yi], ["U0"])
        yield self.ineq(unit(Ri0, Rii, Rip0), both, "jxg-Ri0+Rii+Ri'0" + tag)
        yield self.ineq(unit(Ri0, Rii, Rip0), both, "jxg-Ri0+Rii+Ri'i" + tag)
        yield self.ineq(
            unit("R00", Ri0, Rii, Rip0),
            self.I(["U0", Xi, Uip], [Yi]),
            "jxg-R00+Ri0+Rii+Ri'i" + tag,
        )

    def _reduced(self, i: int) -> Iterator[LinearInequality]:
        ip = other(i)
        Ui, Uip, Xi, Xip = f"U{i}", f"U{ip}", f"X{i}", f"X{ip}"
        Yi, Yip = f"Y{i}", f"Y{ip}"
        Ri, Rip = f"R{i}", f"R{ip}"
        tag = f"[i={i}]"

        private_i = self.I([Xi], [Yi], ["U0", "U1", "U2"])
        private_ip = self.I([Xip], [Yip], ["U0", "U1", "U2"])
        joint_i = self.I([Uip, Xi], [Yi], ["U0"])
        full_i = self.I(["U0", Uip, Xi], [Yi])
        cross_ip = self.I([Ui, Xip], [Yip], ["U0", Uip])

        yield self.ineq(unit(Ri), self.I([Xi], [Yi], ["U0", Uip]), "jxg-Ri" + tag)
        yield self.ineq(unit("R0", Ri), full_i, "jxg-R0+Ri" + tag)
        yield self.ineq(
            unit("R1", "R2"),
            self.I(["U2", "X1"], ["Y1"], ["U0", "U1"])
            + self.I(["U1", "X2"], ["Y2"], ["U0", "U2"]),
            "jxg-R1+R2-1" + tag,
        )
        yield self.ineq(unit("R1", "R2"), joint_i + private_ip, "jxg-R1+R2-2" + tag)
        yield self.ineq(
            unit("R0", "R1", "R2"), full_i + private_ip, "jxg-R0+R1+R2" + tag
        )
        yield self.ineq(
            rates((Ri, 2.0), (Rip, 1.0)),
            joint_i + private_i + cross_ip,
            "jxg-2Ri+Ri'" + tag,
        )
        yield self.ineq(
            rates(("R0", 1.0), (Ri, 2.0), (Rip, 1.0)),
            full_i + private_i + cross_ip,
            "jxg-R0+2Ri+Ri'" + tag,
        )
