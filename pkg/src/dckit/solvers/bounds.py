"""Suprema of admissible inertial step sizes."""
from __future__ import annotations

import dataclasses
import math

from ..exceptions import InvalidLambda, InvalidModulus

__all__ = ["BoundReport", "gamma_sup_exact", "gamma_sup_inexact", "sigma_bar"]


@dataclasses.dataclass(frozen=True)
class BoundReport:
    sup_exact: float
    sup_inexact: float
    sup_indca_inexact: float
    sup_indca_exact: float
    t_star: float
    case: str

    @property
    def h1(self):
        return self.sup_inexact

    @property
    def h2(self):
        return self.sup_indca_inexact


def sigma_bar(sigma1, sigma2, lam, t):
    """Effective modulus of the inexact method for a given ``t``."""
    return sigma1 * (1.0 - t) + sigma2 - lam * sigma2 / t


def gamma_sup_exact(sigma1, sigma2):
    """``(sigma1 + sigma2) / 2``."""
    if not sigma1 + sigma2 > 0 or sigma1 < 0 or sigma2 < 0:
        raise InvalidModulus(f"need sigma1, sigma2 >= 0 with positive sum, got {sigma1}, {sigma2}")
    return 0.5 * (sigma1 + sigma2)


def gamma_sup_inexact(sigma1, sigma2, lam):
    """Step-size suprema for the inexact algorithms.

    ``t_star`` maximizes ``sigma_bar(t)`` over ``(0, 1]``.  Case ``"a"``
    (``sigma1 = 0``) and case ``"b"`` (``lam*sigma2/sigma1 >= 1``) give
    ``t_star = 1`` and the classical bound ``(1 - lam) sigma2 / 2``; case ``"c"``
    gives ``t_star = sqrt(lam*sigma2/sigma1)`` and
    ``(sigma1 + sigma2)/2 - sqrt(lam*sigma1*sigma2)``.
    """
    if not sigma2 > 0 or sigma1 < 0:
        raise InvalidModulus(f"need sigma1 >= 0 and sigma2 > 0, got {sigma1}, {sigma2}")
    if not 0 < lam < 1:
        raise InvalidLambda(f"lambda={lam} not in (0,1)")
    h2 = 0.5 * (1.0 - lam) * sigma2
    if sigma1 == 0:
        t_star, h1, case = 1.0, h2, "a"
    elif lam * sigma2 >= sigma1:
        t_star, h1, case = 1.0, h2, "b"
    else:
        t_star = math.sqrt(lam * sigma2 / sigma1)
        h1 = 0.5 * (sigma1 + sigma2) - math.sqrt(lam * sigma1 * sigma2)
        case = "c"
    return BoundReport(
        sup_exact=0.5 * (sigma1 + sigma2),
        sup_inexact=h1,
        sup_indca_inexact=h2,
        sup_indca_exact=0.5 * sigma2,
        t_star=t_star,
        case=case,
    )
