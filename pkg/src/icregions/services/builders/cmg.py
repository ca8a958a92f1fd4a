# services/builders/cmg.py

from typing import Iterator, Tuple

from icregions.config.families import Family
from icregions.models.system import LinearInequality
from icregions.services.builders.base_builder import (
    BaseRegionBuilder,
    other,
    rates,
    unit,
)


class CMGBuilder(BaseRegionBuilder):
    """Chong-Motani-Garg region over (R1, R2): four bounds per user."""

    family = Family.CMG
    name = "cmg"

    def rate_vars(self) -> Tuple[str, ...]:
        return ("R1", "R2")

    def templates(self) -> Iterator[LinearInequality]:
        for i in (1, 2):
            ip = other(i)
            Ui, Uip, Xi, Xip = f"U{i}", f"U{ip}", f"X{i}", f"X{ip}"
            Yi, Yip = f"Y{i}", f"Y{ip}"
            tag = f"[i={i}]"
            private_i = self.I([Xi], [Yi], ["U0", "U1", "U2"])

            yield self.ineq(unit(f"R{i}"), self.I([Xi], [Yi], ["U0", Uip]), "cmg-Ri" + tag)
            yield self.ineq(
                unit("R1", "R2"),
                private_i + self.I([Ui, Xip], [Yip], ["U0"]),
                "cmg-R1+R2-1" + tag,
            )
            yield self.ineq(
                unit("R1", "R2"),
                self.I(["U2", "X1"], ["Y1"], ["U0", "U1"])
                + self.I(["U1", "X2"], ["Y2"], ["U0", "U2"]),
                "cmg-R1+R2-2" + tag,
            )
            yield self.ineq(
                rates((f"R{i}", 2.0), (f"R{ip}", 1.0)),
                self.I([Uip, Xi], [Yi], ["U0"])
                + private_i
                + self.I([Ui, Xip], [Yip], ["U0", Uip]),
                "cmg-2Ri+Ri'" + tag,
            )
