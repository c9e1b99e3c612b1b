"""Discrete gradient, its adjoint, and (nonconvex) total variation.

Conventions follow the forward-difference stencil with "backward sign":
for pixel ``(i, j)`` the vertical component is ``X[i, j] - X[i+1, j]`` and the
horizontal component is ``X[i, j] - X[i, j+1]``.  Pixels on the last row have
no vertical component, pixels on the last column no horizontal one, and the
bottom-right pixel contributes nothing.
"""
from __future__ import annotations

import dataclasses
import math
from typing import NamedTuple

import numpy as np

from ..exceptions import SizeMismatch

__all__ = [
    "GradField",
    "PhiFamily",
    "f2_smooth_gradient",
    "f2_smooth_value",
    "grad",
    "grad_adjoint",
    "grad_norms",
    "phi_deriv",
    "phi_eval",
    "tv",
    "tv_phi",
]


class GradField(NamedTuple):
    vertical: np.ndarray  # (m-1, n)
    horizontal: np.ndarray  # (m, n-1)

    @property
    def grid_shape(self):
        return (self.horizontal.shape[0], self.vertical.shape[1])


def grad(X):
    X = np.asarray(X, dtype=float)
    return GradField(X[:-1, :] - X[1:, :], X[:, :-1] - X[:, 1:])


def grad_adjoint(P):
    """Adjoint of :func:`grad`: ``<grad(X), P> == <X, grad_adjoint(P)>``."""
    V, H = (np.asarray(a, dtype=float) for a in P)
    m, n = V.shape[0] + 1, V.shape[1]
    if H.shape != (m, n - 1):
        raise SizeMismatch(f"vertical {V.shape} and horizontal {H.shape} do not match one grid")
    out = np.zeros((m, n))
    out[:-1, :] += V
    out[1:, :] -= V
    out[:, :-1] += H
    out[:, 1:] -= H
    return out


# Padded (m, n) variants used by the inner loops; the padding entries are zero.
def _grad_padded(X):
    gv = np.zeros_like(X)
    gh = np.zeros_like(X)
    np.subtract(X[:-1, :], X[1:, :], out=gv[:-1, :])
    np.subtract(X[:, :-1], X[:, 1:], out=gh[:, :-1])
    return gv, gh


def _adjoint_padded(pv, ph):
    out = pv.copy()
    out[1:, :] -= pv[:-1, :]
    out += ph
    out[:, 1:] -= ph[:, :-1]
    return out


def grad_norms(X):
    """Per-pixel Euclidean norm of the discrete gradient, shape ``(m, n)``."""
    gv, gh = _grad_padded(np.asarray(X, dtype=float))
    return np.hypot(gv, gh)


def tv(X):
    """Isotropic total variation, the sum of :func:`grad_norms`."""
    return float(grad_norms(X).sum())


@dataclasses.dataclass(frozen=True)
class PhiFamily:
    """Concave sparsity penalty ``phi_a`` with ``phi(0) = 0``, ``phi'(0) = 1``.

    ``kind`` is one of ``"log"``, ``"rat"``, ``"atan"``, ``"exp"``.
    """

    kind: str
    a: float

    def __post_init__(self):
        if self.kind not in _PHI:
            raise ValueError(f"unknown phi family {self.kind!r}; choose from {sorted(_PHI)}")
        if not self.a > 0:
            raise ValueError("phi parameter a must be positive")

    def value(self, r):
        return _PHI[self.kind][0](np.asarray(r, dtype=float), self.a)

    def deriv(self, r):
        return _PHI[self.kind][1](np.asarray(r, dtype=float), self.a)

    def psi_ratio(self, r):
        """``(1 - phi'(r)) / r``, extended continuously to ``r = 0``."""
        return _PHI[self.kind][2](np.asarray(r, dtype=float), self.a)


_SQRT3 = math.sqrt(3.0)


def _exp_ratio(r, a):
    with np.errstate(divide="ignore", invalid="ignore"):
        q = -np.expm1(-a * r) / r
    return np.where(r > 0, q, a)


_PHI = {
    "log": (
        lambda r, a: np.log1p(a * r) / a,
        lambda r, a: 1.0 / (1.0 + a * r),
        lambda r, a: a / (1.0 + a * r),
    ),
    "rat": (
        lambda r, a: r / (1.0 + 0.5 * a * r),
        lambda r, a: 1.0 / (1.0 + 0.5 * a * r) ** 2,
        lambda r, a: (a + 0.25 * a * a * r) / (1.0 + 0.5 * a * r) ** 2,
    ),
    "atan": (
        # arctan((1 + a r)/sqrt3) - pi/6 folded into one arctan, exact at r = 0
        lambda r, a: np.arctan(_SQRT3 * a * r / (4.0 + a * r)) / (a * _SQRT3 / 4),
        lambda r, a: 4.0 / (a * a * r * r + 2 * a * r + 4),
        lambda r, a: (a * a * r + 2 * a) / (a * a * r * r + 2 * a * r + 4),
    ),
    "exp": (
        lambda r, a: -np.expm1(-a * r) / a,
        lambda r, a: np.exp(-a * r),
        _exp_ratio,
    ),
}


def phi_eval(family, r):
    return family.value(r)


def phi_deriv(family, r):
    return family.deriv(r)


def tv_phi(X, phi):
    """``sum_ij phi(||grad X_ij||)``."""
    return float(phi.value(grad_norms(X)).sum())


def f2_smooth_value(X, phi):
    """``TV(X) - TV_phi(X)``, a convex C^1 function of ``X``."""
    r = grad_norms(X)
    return float((r - phi.value(r)).sum())


def f2_smooth_gradient(X, phi):
    """Gradient of ``X -> TV(X) - TV_phi(X)``."""
    X = np.asarray(X, dtype=float)
    gv, gh = _grad_padded(X)
    w = phi.psi_ratio(np.hypot(gv, gh))
    return _adjoint_padded(w * gv, w * gh)
