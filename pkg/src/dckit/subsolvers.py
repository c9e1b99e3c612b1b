"""Certified solvers for the convex subproblems.

Every solver returns a :class:`SubproblemResult` whose ``gap`` is an upper
bound on ``G(point) - inf G`` for the objective ``G`` it minimizes.  For a
DC subproblem ``G(x) = f1(x) - <c, x>`` such a bound makes ``c`` a
``gap``-subgradient of ``f1`` at ``point``, which is what the inexact outer
algorithm consumes.
"""
from __future__ import annotations

import dataclasses
import math
from typing import Any, Callable, Optional

import numpy as np

from .imaging.calculus import _adjoint_padded, _grad_padded

__all__ = [
    "SubproblemResult",
    "epsilon_certificate",
    "fista_composite",
    "soft_threshold",
    "tv_prox",
]


@dataclasses.dataclass
class SubproblemResult:
    point: np.ndarray
    gap: float
    inner_iters: int
    converged: bool
    state: Any = None
    gap_kind: str = "duality"
    objective: Optional[float] = None


def soft_threshold(v, tau):
    """Prox of ``tau * ||.||_1``: ``sign(v) * max(|v| - tau, 0)``."""
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    v = np.asarray(v, dtype=float)
    return np.sign(v) * np.maximum(np.abs(v) - tau, 0.0)


def epsilon_certificate(result, x_prev, lam, sigma2):
    """Inexactness test of the inexact refined algorithm.

    Returns ``(accepted, epsilon)`` with ``epsilon = result.gap`` and
    ``accepted`` iff ``epsilon <= lam * sigma2 / 2 * ||point - x_prev||^2``.
    """
    eps = float(result.gap)
    d = np.asarray(result.point, dtype=float).ravel() - np.asarray(x_prev, dtype=float).ravel()
    threshold = 0.5 * lam * sigma2 * float(d @ d)
    return eps <= threshold, eps


def fista_composite(
    smooth_grad: Callable,
    smooth_val: Optional[Callable],
    lipschitz: float,
    prox: Callable,
    x_init,
    inner_stop: float = 1e-4,
    max_iters: int = 2000,
    gap_oracle: Optional[Callable] = None,
    *,
    sigma: float = 0.0,
    nonsmooth_val: Optional[Callable] = None,
    accept: Optional[Callable] = None,
    eps_target: float = 0.0,
):
    """FISTA for ``min s(x) + h(x)`` with ``s`` L-smooth and ``prox(v, step)``.

    Plain momentum sequence, no restart.  Stops once consecutive iterates are
    within ``inner_stop`` (and, if ``eps_target > 0``, the gap is below it),
    or as soon as ``accept(x, gap)`` returns true.

    The gap comes from ``gap_oracle(x)`` when supplied.  Otherwise, if the
    composite objective is ``sigma``-strongly convex, the last proximal
    gradient step yields an explicit subgradient ``g`` of the objective at
    the new iterate and ``||g||^2 / (2 sigma)`` bounds the suboptimality.
    Without either the gap is reported as infinite.
    """
    if not lipschitz > 0:
        raise ValueError("lipschitz must be positive")
    step = 1.0 / lipschitz
    kind = "oracle" if gap_oracle is not None else ("strong-convexity" if sigma > 0 else "none")

    def prox_step(y):
        """One proximal gradient step from ``y`` and the certified gap there."""
        gy = smooth_grad(y)
        x_new = prox(y - step * gy, step)
        if gap_oracle is not None:
            return x_new, float(gap_oracle(x_new))
        if sigma > 0:
            # lipschitz*(y - x_new) - gy is in dh(x_new), so g is in dG(x_new)
            g = lipschitz * (y - x_new) + smooth_grad(x_new) - gy
            return x_new, float(g.ravel() @ g.ravel()) / (2.0 * sigma)
        return x_new, math.inf

    need_gap = accept is not None or eps_target > 0
    x = np.array(x_init, dtype=float)
    y = x.copy()
    t = 1.0
    gap = math.inf
    converged = False
    k = 0
    for k in range(1, max_iters + 1):
        if need_gap:
            x_new, gap = prox_step(y)
            if accept is not None and accept(x_new, gap):
                x, converged = x_new, True
                break
        else:
            x_new = prox(y - step * smooth_grad(y), step)
        dist = float(np.linalg.norm(x_new - x))
        t_new = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t * t))
        y = x_new + ((t - 1.0) / t_new) * (x_new - x)
        x, t = x_new, t_new
        if dist <= inner_stop and (eps_target <= 0 or gap <= eps_target):
            converged = True
            break
    if not (need_gap and converged):
        # certify from a final proximal step; the certified point replaces x
        x, gap = prox_step(x)
    obj = None
    if smooth_val is not None and nonsmooth_val is not None:
        obj = float(smooth_val(x) + nonsmooth_val(x))
    return SubproblemResult(x, gap, k, converged, gap_kind=kind, objective=obj)


def tv_prox(Z, weight, inner_stop=1e-4, max_iters=2000, *, warm=None, accept=None, eps_target=0.0):
    """Solve ``min_X weight/2 ||X - Z||_F^2 + TV(X)`` through its dual.

    Accelerated projected gradient (FGP) on the dual field ``P``, one
    Euclidean unit ball per pixel (single components on the last row and
    column).  The primal iterate is ``X = Z - grad_adjoint(P) / weight`` and
    the duality gap at it reduces to ``sum_ij ||grad X_ij|| - <grad X_ij, P_ij>``,
    a sum of nonnegative terms.

    ``warm`` is a dual field returned in ``result.state`` by a previous call.
    Stops when ``||X_k - X_{k-1}||_F <= inner_stop`` (and the gap is below
    ``eps_target`` if positive), or once ``accept(X, gap)`` is true.
    """
    if not weight > 0:
        raise ValueError("weight must be positive")
    Z = np.asarray(Z, dtype=float)
    if Z.ndim == 1:
        Z = Z[:, None]
    m, n = Z.shape
    mask_v = np.ones((m, n))
    mask_v[-1, :] = 0.0
    mask_h = np.ones((m, n))
    mask_h[:, -1] = 0.0
    if warm is not None:
        pv, ph = (np.array(a, dtype=float) for a in warm)
    else:
        pv, ph = np.zeros((m, n)), np.zeros((m, n))
    rv, rh = pv.copy(), ph.copy()
    step = weight / 8.0
    inv_w = 1.0 / weight
    t = 1.0

    def primal(qv, qh):
        return Z - inv_w * _adjoint_padded(qv, qh)

    def duality_gap(X, qv, qh):
        gv, gh = _grad_padded(X)
        return float(np.sum(np.hypot(gv, gh) - (gv * qv + gh * qh)))

    X = primal(pv, ph)
    gap = math.inf
    converged = False
    need_gap = accept is not None or eps_target > 0
    k = 0
    for k in range(1, max_iters + 1):
        gv, gh = _grad_padded(primal(rv, rh))
        qv = rv + step * gv
        qh = rh + step * gh
        scale = np.maximum(1.0, np.hypot(qv, qh))
        qv /= scale
        qh /= scale
        qv *= mask_v
        qh *= mask_h
        t_new = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t * t))
        beta = (t - 1.0) / t_new
        rv = qv + beta * (qv - pv)
        rh = qh + beta * (qh - ph)
        pv, ph, t = qv, qh, t_new
        X_new = primal(pv, ph)
        dist = float(np.linalg.norm(X_new - X))
        X = X_new
        if need_gap:
            gap = duality_gap(X, pv, ph)
            if accept is not None and accept(X, gap):
                converged = True
                break
        if dist <= inner_stop and (eps_target <= 0 or gap <= eps_target):
            converged = True
            break
    if not need_gap or not math.isfinite(gap):
        gap = duality_gap(X, pv, ph)
    return SubproblemResult(X, max(gap, 0.0), k, converged, state=(pv, ph), gap_kind="duality")
