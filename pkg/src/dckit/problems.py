"""Concrete DC problems.

All builders return a :class:`~dckit.core.DcProblem` over flat vectors; the
imaging ones set ``shape`` so iterates can be reshaped with
``problem.as_grid``.
"""
from __future__ import annotations

import itertools
import math

import numpy as np

from .core import DcProblem
from .exceptions import InvalidModulus
from .imaging import (
    PhiFamily,
    convolve,
    convolve_adjoint,
    f2_smooth_gradient,
    f2_smooth_value,
    tv,
)
from .subsolvers import SubproblemResult, fista_composite, soft_threshold, tv_prox

__all__ = [
    "brute_force_critical_points",
    "build_deblur_problem",
    "build_denoise_problem",
    "build_l12_problem",
    "build_signal1d_problem",
    "build_toy_1d",
]


def _sq(v):
    v = np.ravel(v)
    return float(v @ v)


def _tv_subproblem(shape, center_fn, weight_base):
    """Subproblem oracle for ``weight/2 ||X - X_obs||^2 + TV(X)``-type f1."""

    def solve(c, eps_target=0.0, *, reg=0.0, warm=None, accept=None, inner_stop=1e-4, max_iters=2000):
        w = weight_base + reg
        Z = center_fn(np.reshape(c, shape)) / w
        acc = None
        if accept is not None:
            acc = lambda X, gap: accept(X.ravel(), gap)  # noqa: E731
        res = tv_prox(Z, w, inner_stop, max_iters, warm=warm, accept=acc, eps_target=eps_target)
        res.point = res.point.ravel()
        return res

    return solve


def build_denoise_problem(X_obs, mu, phi):
    """``mu/2 ||X - X_obs||^2 + TV_phi(X)`` as ``(fidelity + TV) - (TV - TV_phi)``."""
    if not mu > 0:
        raise ValueError("mu must be positive")
    if not isinstance(phi, PhiFamily):
        raise TypeError("phi must be a PhiFamily")
    X_obs = np.array(X_obs, dtype=float)
    shape = X_obs.shape

    def eval_f1(x):
        X = x.reshape(shape)
        return 0.5 * mu * _sq(X - X_obs) + tv(X)

    def eval_f2(x):
        return f2_smooth_value(x.reshape(shape), phi)

    def subgrad_f2(x):
        return f2_smooth_gradient(x.reshape(shape), phi).ravel()

    solve = _tv_subproblem(shape, lambda C: mu * X_obs + C, mu)
    return DcProblem(
        eval_f1, eval_f2, subgrad_f2, solve, sigma1=float(mu), sigma2=0.0,
        dimension=X_obs.size, name="denoise", shape=shape,
        meta={"mu": mu, "phi": phi, "observed": X_obs},
    )


def build_deblur_problem(X_obs, mu, t, kernel, phi):
    """``mu/2 ||L X - X_obs||^2 + TV_phi(X)`` with the ``t``-shifted decomposition.

    ``f1 = t/2 ||X - X_obs||^2 + TV`` and
    ``f2 = TV - TV_phi + t/2 ||X - X_obs||^2 - mu/2 ||L X - X_obs||^2``.
    ``||L||`` is bounded by the kernel's l1 norm, so ``sigma2 = t - mu*||k||_1^2``.
    """
    if not mu > 0:
        raise ValueError("mu must be positive")
    X_obs = np.array(X_obs, dtype=float)
    kernel = np.asarray(kernel, dtype=float)
    shape = X_obs.shape
    norm_bound = float(np.abs(kernel).sum())
    sigma2 = t - mu * norm_bound**2
    if sigma2 < 0:
        raise InvalidModulus(f"t={t} below mu*||L||^2={mu * norm_bound**2}: f2 not convex")

    def eval_f1(x):
        X = x.reshape(shape)
        return 0.5 * t * _sq(X - X_obs) + tv(X)

    def eval_f2(x):
        X = x.reshape(shape)
        return (
            f2_smooth_value(X, phi)
            + 0.5 * t * _sq(X - X_obs)
            - 0.5 * mu * _sq(convolve(X, kernel) - X_obs)
        )

    def subgrad_f2(x):
        X = x.reshape(shape)
        g = f2_smooth_gradient(X, phi) + t * (X - X_obs)
        g -= mu * convolve_adjoint(convolve(X, kernel) - X_obs, kernel)
        return g.ravel()

    solve = _tv_subproblem(shape, lambda C: t * X_obs + C, t)
    return DcProblem(
        eval_f1, eval_f2, subgrad_f2, solve, sigma1=float(t), sigma2=float(sigma2),
        dimension=X_obs.size, name="deblur", shape=shape,
        meta={"mu": mu, "t": t, "phi": phi, "kernel": kernel, "observed": X_obs},
    )


def build_signal1d_problem(b, mu, phi):
    """``mu/2 ||x - b||^2 + sum_i phi(|x_{i+1} - x_i|)`` on a length-n signal."""
    b = np.asarray(b, dtype=float).ravel()
    prob = build_denoise_problem(b[:, None], mu, phi)
    return DcProblem(
        prob.eval_f1, prob.eval_f2, prob.subgrad_f2, prob.solve_subproblem,
        sigma1=prob.sigma1, sigma2=0.0, dimension=b.size, name="signal1d",
        shape=None, meta={"mu": mu, "phi": phi, "observed": b},
    )


def _smallest_eig(AtA):
    """Sound lower estimate of ``lambda_min(A^T A)`` (never negative)."""
    w = np.linalg.eigvalsh(AtA)
    # pad by a multiple of the eigensolver's backward error
    return max(0.0, float(w[0]) - 64 * np.finfo(float).eps * float(abs(w[-1]))), float(w[-1])


def build_l12_problem(A, b, lam, rho=1.0):
    """``1/2 ||Ax - b||^2 + lam ||x||_1 - lam ||x||_2`` with ``rho/2 ||x||^2`` on both sides."""
    if not lam > 0:
        raise ValueError("lambda must be positive")
    if rho < 0:
        raise ValueError("rho must be nonnegative")
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).ravel()
    AtA = A.T @ A
    Atb = A.T @ b
    lmin, lmax = _smallest_eig(AtA)
    n = A.shape[1]

    def eval_f1(x):
        return 0.5 * _sq(A @ x - b) + lam * float(np.abs(x).sum()) + 0.5 * rho * _sq(x)

    def eval_f2(x):
        return lam * float(np.linalg.norm(x)) + 0.5 * rho * _sq(x)

    def subgrad_f2(x):
        x = np.asarray(x, dtype=float)
        nx = np.linalg.norm(x)
        g = rho * x
        if nx > 0:
            g = g + lam * x / nx
        return g

    def solve(c, eps_target=0.0, *, reg=0.0, warm=None, accept=None, inner_stop=1e-4, max_iters=2000):
        r = rho + reg
        c = np.asarray(c, dtype=float)

        def s_val(x):
            return 0.5 * _sq(A @ x - b) + 0.5 * r * _sq(x) - float(c @ x)

        def s_grad(x):
            return AtA @ x - Atb + r * x - c

        def h_val(x):
            return lam * float(np.abs(x).sum())

        gap_oracle = None
        if r > 0:
            def gap_oracle(x):
                w = A @ x - b
                v = -(A.T @ w) + c
                dual = -(0.5 * _sq(w) + float(w @ b)) - _sq(soft_threshold(v, lam)) / (2 * r)
                return max(s_val(x) + h_val(x) - dual, 0.0)

        x0 = np.zeros(n) if warm is None else warm
        res = fista_composite(
            s_grad, s_val, lmax + r, lambda v, step: soft_threshold(v, step * lam), x0,
            inner_stop, max_iters, gap_oracle, sigma=lmin + r, nonsmooth_val=h_val,
            accept=accept, eps_target=eps_target,
        )
        res.state = res.point
        return res

    return DcProblem(
        eval_f1, eval_f2, subgrad_f2, solve, sigma1=lmin + rho, sigma2=float(rho),
        dimension=n, name="l1-2", meta={"A": A, "b": b, "lam": lam, "rho": rho},
    )


def build_toy_1d():
    """``x^2 - |x|`` with closed-form subproblems; critical set {-1/2, 0, 1/2}."""

    def solve(c, eps_target=0.0, *, reg=0.0, warm=None, accept=None, **_):
        x = np.asarray(c, dtype=float).reshape(1) / (2.0 + reg)
        return SubproblemResult(x, 0.0, 1, True, gap_kind="exact")

    def hull(lo, hi):
        # interval hulls of d(x^2) and d|x| over the box [lo, hi]
        a, b = lo[0], hi[0]
        s_lo = -1.0 if a <= 0 else 1.0
        s_hi = 1.0 if b >= 0 else -1.0
        return (np.array([2 * a]), np.array([2 * b]), np.array([s_lo]), np.array([s_hi]))

    return DcProblem(
        eval_f1=lambda x: float(np.asarray(x).ravel()[0] ** 2),
        eval_f2=lambda x: float(abs(np.asarray(x).ravel()[0])),
        subgrad_f2=lambda x: np.sign(np.asarray(x, dtype=float).reshape(1)),
        solve_subproblem=solve,
        sigma1=2.0, sigma2=0.0, dimension=1, name="toy1d",
        meta={"subdiff_hull": hull, "critical_set": (-0.5, 0.0, 0.5)},
    )


def brute_force_critical_points(problem, grid_lo, grid_hi, step, tol=1e-10):
    """Points ``x`` with ``df1(x) & df2(x)`` nonempty, by interval bisection.

    ``problem.meta["subdiff_hull"](lo, hi)`` must return componentwise
    interval hulls ``(lo1, hi1, lo2, hi2)`` of both subdifferentials over the
    box ``[lo, hi]``.  The box ``[grid_lo, grid_hi]^d`` is scanned with cells
    of width ``step``; cells where the hulls can intersect in every coordinate
    are bisected down to width ``tol``, and surviving cells are clustered.
    """
    hull = problem.meta["subdiff_hull"]
    d = problem.dimension

    def may_be_critical(lo, hi):
        lo1, hi1, lo2, hi2 = hull(lo, hi)
        return bool(np.all(np.maximum(lo1, lo2) <= np.minimum(hi1, hi2)))

    edges = np.arange(grid_lo, grid_hi, step)
    boxes = [
        (np.array(c, dtype=float), np.minimum(np.array(c) + step, grid_hi))
        for c in itertools.product(edges, repeat=d)
    ]
    boxes = [bx for bx in boxes if may_be_critical(*bx)]
    width = step
    while width > tol and boxes:
        nxt = []
        for lo, hi in boxes:
            mid = 0.5 * (lo + hi)
            for corner in itertools.product((0, 1), repeat=d):
                c = np.array(corner, dtype=bool)
                clo = np.where(c, mid, lo)
                chi = np.where(c, hi, mid)
                if may_be_critical(clo, chi):
                    nxt.append((clo, chi))
        boxes = nxt
        width /= 2
        if len(boxes) > 10_000:
            raise RuntimeError("critical set is not isolated at this resolution")
    pts = sorted((0.5 * (lo + hi) for lo, hi in boxes), key=tuple)
    clusters = []
    for p in pts:
        if clusters and np.max(np.abs(p - clusters[-1][-1])) <= 4 * max(width, tol):
            clusters[-1].append(p)
        else:
            clusters.append([p])
    return [np.mean(c, axis=0) for c in clusters]
