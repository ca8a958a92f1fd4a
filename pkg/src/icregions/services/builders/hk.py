# services/builders/hk.py
"""
Han-Kobayashi region: the rate-split quadruple form and its (R1, R2) form.
"""

from typing import Iterator, Tuple

from icregions.config.families import Family
from icregions.models.system import LinearInequality
from icregions.services.builders.base_builder import (
    BaseRegionBuilder,
    other,
    rates,
    unit,
)
from icregions.exceptions import ValidationFailed

HK_FORMS = ("split", "reduced")


class HKBuilder(BaseRegionBuilder):
    family = Family.HK

    def __init__(self, spec, ch, form: str = "split", **kwargs):
        if form not in HK_FORMS:
            raise ValidationFailed(f"unknown HK form {form!r}; expected {HK_FORMS}")
        self.form = form
        self.name = "hk" if form == "split" else "hk-reduced"
        super().__init__(spec, ch, **kwargs)

    def rate_vars(self) -> Tuple[str, ...]:
        if self.form == "split":
            return ("R10", "R11", "R20", "R22")
        return ("R1", "R2")

    def templates(self) -> Iterator[LinearInequality]:
        for i in (1, 2):
            if self.form == "split":
                yield from self._split(i)
            else:
                yield from self._reduced(i)

    def _split(self, i: int) -> Iterator[LinearInequality]:
        ip = other(i)
        U0, Ui0, Uip0, Uii = "U0", f"U{i}0", f"U{ip}0", f"U{i}{i}"
        Y = f"Y{i}"
        Ri0, Rip0, Rii = f"R{i}0", f"R{ip}0", f"R{i}{i}"
        tag = f"[i={i}]"

        yield self.ineq(unit(Ri0), self.I([Ui0], [Y], [U0, Uip0, Uii]), "hk-Ri0" + tag)
        yield self.ineq(
            unit(Rip0), self.I([Uip0], [Y], [U0, Ui0, Uii]), "hk-Ri'0" + tag
        )
        yield self.ineq(unit(Rii), self.I([Uii], [Y], [U0, "U10", "U20"]), "hk-Rii" + tag)
        yield self.ineq(
            unit("R10", "R20"), self.I(["U10", "U20"], [Y], [U0, Uii]), "hk-R10+R20" + tag
        )
        yield self.ineq(
            unit(Ri0, Rii), self.I([Ui0, Uii], [Y], [U0, Uip0]), "hk-Ri0+Rii" + tag
        )
        yield self.ineq(
            unit(Rip0, Rii), self.I([Uip0, Uii], [Y], [U0, Ui0]), "hk-Ri'0+Rii" + tag
        )
        yield self.ineq(
            unit("R10", "R20", Rii),
            self.I(["U10", "U20", Uii], [Y], [U0]),
            "hk-R10+R20+Rii" + tag,
        )

    def _reduced(self, i: int) -> Iterator[LinearInequality]:
        ip = other(i)
        U0, Ui0, Uip0 = "U0", f"U{i}0", f"U{ip}0"
        Uii, Uipip = f"U{i}{i}", f"U{ip}{ip}"
        Yi, Yip = f"Y{i}", f"Y{ip}"
        Ri, Rip = f"R{i}", f"R{ip}"
        tag = f"[i={i}]"

        private_i = self.I([Uii], [Yi], [U0, "U10", "U20"])
        cross_i = self.I([Ui0, Uipip], [Yip], [U0, Uip0])

        yield self.ineq(unit(Ri), self.I([Ui0, Uii], [Yi], [U0, Uip0]), "hk-Ri" + tag)
        yield self.ineq(
            unit(Ri),
            private_i + self.I([Ui0], [Yip], [U0, Uip0, Uipip]),
            "hk-Ri-cross" + tag,
        )
        yield self.ineq(
            unit("R1", "R2"),
            private_i + self.I(["U10", "U20", Uipip], [Yip], [U0]),
            "hk-R1+R2-1" + tag,
        )
        yield self.ineq(
            unit("R1", "R2"),
            self.I(["U20", "U11"], ["Y1"], [U0, "U10"])
            + self.I(["U10", "U22"], ["Y2"], [U0, "U20"]),
            "hk-R1+R2-2" + tag,
        )
        yield self.ineq(
            rates((Ri, 2.0), (Rip, 1.0)),
            private_i + self.I(["U10", "U20", Uii], [Yi], [U0]) + cross_i,
            "hk-2Ri+Ri'-1" + tag,
        )
        yield self.ineq(
            rates((Ri, 2.0), (Rip, 1.0)),
            2 * private_i + cross_i + self.I(["U10", "U20"], [Yip], [U0, Uipip]),
            "hk-2Ri+Ri'-2" + tag,
        )
