# services/builders/lemma.py
"""
The two-variable elimination instance used to project the binning rates out
of the CRNG region, in symbolic form: the parameters are system variables, so
eliminating rho1, rho2 leaves a system over the parameters alone.
"""

from typing import Dict

from icregions.models.system import InequalitySystem, LinearInequality

PARAMETERS = (
    "rho_hi1",
    "rho_hi2",
    "rho_lo1",
    "rho_lo2",
    "delta1",
    "delta2",
    "sigma1",
    "sigma2",
)
ELIMINATED = ("rho1", "rho2")


def _leq(coeffs: Dict[str, float], tag: str) -> LinearInequality:
    return LinearInequality(coeffs, 0.0, "<=", tag)


def lemma_fme_system() -> InequalitySystem:
    """
    For i in {1, 2}:
        rho_lo_i <= rho_i <= rho_hi_i
        rho_i - rho_i' <= delta_i
        rho_1 + rho_2 >= sigma_i
    """
    rows = []
    for i, ip in ((1, 2), (2, 1)):
        rows.append(_leq({f"rho{i}": 1.0, f"rho_hi{i}": -1.0}, f"fme-rho-hi[i={i}]"))
        rows.append(_leq({f"rho_lo{i}": 1.0, f"rho{i}": -1.0}, f"fme-rho-lo[i={i}]"))
        rows.append(
            _leq(
                {f"rho{i}": 1.0, f"rho{ip}": -1.0, f"delta{i}": -1.0},
                f"fme-delta[i={i}]",
            )
        )
        rows.append(
            _leq({f"sigma{i}": 1.0, "rho1": -1.0, "rho2": -1.0}, f"fme-sigma[i={i}]")
        )
    return InequalitySystem(
        rate_vars=PARAMETERS,
        aux_vars=ELIMINATED,
        inequalities=rows,
        nonneg=False,
        name="lemma-fme",
    )


def lemma_fme_closed_form() -> InequalitySystem:
    """
    The projection onto the parameters:
        0 <= delta_1 + delta_2
        rho_lo_i <= min(rho_hi_i, rho_hi_i' + delta_i)
        sigma_i <= min(rho_hi_1 + rho_hi_2, 2 rho_hi_i' + delta_i, 2 rho_hi_i + delta_i')
    """
    rows = [_leq({"delta1": -1.0, "delta2": -1.0}, "fme-delta1+delta2")]
    for i, ip in ((1, 2), (2, 1)):
        rows.append(_leq({f"rho_lo{i}": 1.0, f"rho_hi{i}": -1.0}, f"fme-lo<hi[i={i}]"))
        rows.append(
            _leq(
                {f"rho_lo{i}": 1.0, f"rho_hi{ip}": -1.0, f"delta{i}": -1.0},
                f"fme-lo<hi'+delta[i={i}]",
            )
        )
        rows.append(
            _leq(
                {f"sigma{i}": 1.0, "rho_hi1": -1.0, "rho_hi2": -1.0},
                f"fme-sigma<hi1+hi2[i={i}]",
            )
        )
        rows.append(
            _leq(
                {f"sigma{i}": 1.0, f"rho_hi{ip}": -2.0, f"delta{i}": -1.0},
                f"fme-sigma<2hi'+delta[i={i}]",
            )
        )
        rows.append(
            _leq(
                {f"sigma{i}": 1.0, f"rho_hi{i}": -2.0, f"delta{ip}": -1.0},
                f"fme-sigma<2hi+delta'[i={i}]",
            )
        )
    return InequalitySystem(
        rate_vars=PARAMETERS,
        inequalities=rows,
        nonneg=False,
        name="lemma-fme-closed",
    )
