"""Outer DC iterations: DCA, SDCA and the two refined inertial methods.

All four share one loop.  Each iteration picks ``y^k`` in ``df2(x^k)``, forms
the linear tilt of the convex subproblem and asks the problem's subsolver for
the next iterate.  The loop records objective, step length, the Lyapunov value
relevant to the algorithm and (optionally) the KL energy, and checks the
descent inequalities with slack ``2*gap + assert_tol*(1 + |L_k|)``.
"""
from __future__ import annotations

import dataclasses
import logging
import math
import time

import numpy as np

from ..core import (
    Algorithm,
    IterationRecord,
    SolverConfig,
    Termination,
    Trace,
    evaluate_objective,
    resolve_gamma,
    resolve_t,
    validate_problem,
)
from ..exceptions import CertificateUnavailable, LyapunovViolation, MissingSubgradients
from ..subsolvers import epsilon_certificate
from .bounds import sigma_bar

__all__ = [
    "criticality_residual",
    "energy_along_trace",
    "run",
    "run_dca",
    "run_rindca_exact",
    "run_rindca_inexact",
    "run_sdca",
]

log = logging.getLogger(__name__)

# total inner budget of one inexact step, in units of inner_max_iters
_BUDGET_FACTOR = 8


@dataclasses.dataclass(frozen=True)
class _Coefficients:
    lyapunov: float  # coefficient of ||x^k - x^{k-1}||^2 in the Lyapunov value
    energy: float  # coefficient of ||x - z||^2 in the energy
    descent: float  # guaranteed decrease per ||x^k - x^{k-1}||^2


def _coefficients(problem, algorithm, gamma, lam=None, t=None):
    s1, s2 = problem.sigma1, problem.sigma2
    if algorithm == Algorithm.SDCA:
        # DCA on (f1 + g/2||.||^2) - (f2 + g/2||.||^2), no inertia
        return _Coefficients(0.5 * (s1 + s2 + 2 * gamma), 0.5 * (s1 + 2 * gamma),
                             0.5 * (s1 + s2 + 2 * gamma))
    if algorithm == Algorithm.RINDCA_N:
        sb = sigma_bar(s1, s2, lam, t)
        return _Coefficients(0.5 * (sb - gamma), 0.5 * (sb - s2 - gamma), 0.5 * (sb - 2 * gamma))
    return _Coefficients(0.5 * (s1 + s2 - gamma), 0.5 * (s1 - gamma), 0.5 * (s1 + s2 - 2 * gamma))


def _sq(v):
    return float(v @ v)


def run(problem, x0, config=None, *, metric=None, **overrides):
    """Run ``config.algorithm`` from ``x0``; keyword overrides patch the config.

    ``metric(x)``, if given, is evaluated on every iterate and stored in the
    records (used for SSIM against a ground truth).
    """
    config = dataclasses.replace(config or SolverConfig(), **overrides)
    validate_problem(problem, config).raise_if_invalid()
    gamma = resolve_gamma(problem, config)
    alg = config.algorithm
    if alg == Algorithm.RINDCA_N:
        t = resolve_t(problem, config)
        return _loop(problem, x0, config, gamma, _coefficients(problem, alg, gamma, config.lam, t),
                     metric, inexact=True)
    return _loop(problem, x0, config, gamma, _coefficients(problem, alg, gamma), metric)


def run_dca(problem, x0, config=None, **kw):
    """Classical DCA: ``x^{k+1} = argmin f1(x) - <y^k, x>``."""
    return run(problem, x0, config, algorithm=Algorithm.DCA, **kw)


def run_sdca(problem, x0, gamma, config=None, **kw):
    """DCA with a proximal term: ``argmin f1 + gamma/2||x||^2 - <y^k + gamma x^k, x>``."""
    return run(problem, x0, config, algorithm=Algorithm.SDCA, gamma=gamma, **kw)


def run_rindca_exact(problem, x0, gamma=None, config=None, **kw):
    """Refined inertial DCA with exact subproblems.

    ``gamma=None`` uses ``config.gamma_frac`` of the supremum
    ``(sigma1 + sigma2)/2`` (or ``sigma2/2`` with ``indca=True``).
    """
    return run(problem, x0, config, algorithm=Algorithm.RINDCA_E, gamma=gamma, **kw)


def run_rindca_inexact(problem, x0, gamma=None, lam=None, t=None, config=None, **kw):
    """Refined inertial DCA with certified inexact subproblems."""
    config = config or SolverConfig()
    return run(problem, x0, config, algorithm=Algorithm.RINDCA_N, gamma=gamma,
               lam=config.lam if lam is None else lam, t=config.t if t is None else t, **kw)


def _loop(problem, x0, config, gamma, coef, metric, inexact=False):
    alg = config.algorithm
    sdca = alg == Algorithm.SDCA
    reg = gamma if sdca else 0.0
    lam, s2 = config.lam, problem.sigma2
    x = np.array(x0, dtype=float).ravel()
    x_prev = x.copy()
    start = time.perf_counter()
    f = evaluate_objective(problem, x)
    f2_x = problem.eval_f2(x)
    L = f
    E = None
    records = [IterationRecord(0, f, 0.0, L, None, 0.0, 0, 0.0,
                               None if metric is None else float(metric(x)))]
    xs = [x.copy()] if (config.store_x or config.store_y) else None
    ys = [] if config.store_y else None
    trace = Trace(records, Termination.MAX_ITERS, x, alg, gamma, 2 * coef.lyapunov, coef.energy,
                  xs, ys)
    if config.indca:
        trace.notes.append("InDCA step-size range")
    warm = None
    for k in range(config.max_outer_iters):
        y = np.asarray(problem.subgrad_f2(x), dtype=float).ravel()
        if ys is not None:
            ys.append(y.copy())
        if sdca:
            c = y + gamma * x
        else:
            c = y + gamma * (x - x_prev)
        if inexact:
            res, status = _inexact_step(problem, c, x, warm, config, lam, s2)
            if status is not None:
                trace.termination = status
                if status == Termination.STEP_TOL:
                    trace.notes.append(f"candidate collapsed onto x^{k} before certification")
                break
        else:
            res = problem.solve_subproblem(c, 0.0, reg=reg, warm=warm,
                                           inner_stop=config.inner_stop,
                                           max_iters=config.inner_max_iters)
            if not res.converged:
                trace.termination = Termination.SUBSOLVER_FAILURE
                trace.notes.append(f"subsolver budget exhausted at outer iteration {k}")
                break
        warm = res.state
        x_new = np.asarray(res.point, dtype=float).ravel()
        d = x_new - x
        step2 = _sq(d)
        gap = float(res.gap)
        f_new = evaluate_objective(problem, x_new)
        L_new = f_new + coef.lyapunov * step2
        E_new = None
        if config.track_energy:
            E_new = (problem.eval_f1(x_new) - float(x_new @ y) + float(y @ x) - f2_x
                     + coef.energy * step2)
        prev_step2 = records[-1].step_norm ** 2
        slack = 2.0 * gap if math.isfinite(gap) else math.inf
        _check(trace, config, k + 1, "lyapunov", L_new, L, slack)
        if E is not None and E_new is not None:
            _check(trace, config, k + 1, "energy", E_new, E - coef.descent * prev_step2, slack,
                   scale=E)
        x_prev, x = x, x_new
        f, L, E = f_new, L_new, E_new
        f2_x = problem.eval_f2(x)
        records.append(IterationRecord(
            k + 1, f, math.sqrt(step2), L, E, gap, res.inner_iters,
            time.perf_counter() - start, None if metric is None else float(metric(x)),
        ))
        if xs is not None:
            xs.append(x.copy())
        trace.final_point = x
        if not math.isfinite(f) or np.linalg.norm(x) > config.divergence_guard:
            trace.termination = Termination.DIVERGENCE_GUARD
            break
        if math.sqrt(step2) <= config.step_tol:
            trace.termination = Termination.STEP_TOL
            break
    if trace.violations and config.monitor == "warn":
        log.warning("%s: %d descent-monitor violations", problem.name, len(trace.violations))
    return trace


def _inexact_step(problem, c, x, warm, config, lam, s2):
    """Find a candidate whose certified gap meets the acceptance threshold."""

    def accept(point, gap):
        return gap <= 0.5 * lam * s2 * _sq(point - x)

    # the first round may stop on the usual distance rule; near convergence the
    # iterates stall long before the gap is small enough, so the second round
    # stops only on acceptance or once the remaining budget is spent
    rounds = ((config.inner_stop, config.inner_max_iters),
              (0.0, config.inner_max_iters * (_BUDGET_FACTOR - 1)))
    res = None
    for inner_stop, budget in rounds:
        res = problem.solve_subproblem(c, 0.0, warm=warm, accept=accept,
                                       inner_stop=inner_stop, max_iters=budget)
        if not math.isfinite(res.gap):
            raise CertificateUnavailable(f"{problem.name}: subsolver returned no gap bound")
        ok, _ = epsilon_certificate(res, x, lam, s2)
        if ok:
            return res, None
        if math.sqrt(_sq(np.ravel(res.point) - x)) <= config.step_tol:
            return res, Termination.STEP_TOL
        warm = res.state
    return res, Termination.SUBSOLVER_FAILURE


def _check(trace, config, k, kind, new, bound, slack, scale=None):
    if config.monitor == "off":
        return
    ref = bound if scale is None else scale
    excess = new - (bound + slack + config.assert_tol * (1.0 + abs(ref)))
    if excess > 0:
        trace.violations.append((k, kind, excess))
        if config.monitor == "abort":
            raise LyapunovViolation(f"{kind} increased at k={k} by {excess:.3e} beyond slack")


def energy_along_trace(problem, trace, gamma=None):
    """``E(x^{k+1}, y^k, x^k)`` for every recorded step, without a conjugate oracle.

    Uses ``f2*(y^k) = <y^k, x^k> - f2(x^k)``, valid because ``y^k`` is a
    subgradient of ``f2`` at ``x^k``.  The quadratic coefficient is
    the one the run was monitored with: ``(sigma1 - gamma)/2`` for the exact
    methods, its counterparts for SDCA and the inexact method.  Passing a
    different ``gamma`` forces ``(sigma1 - gamma)/2``.
    """
    if trace.ys is None or trace.xs is None:
        raise MissingSubgradients("trace recorded without store_y=True")
    if gamma is None or gamma == trace.gamma:
        coef = trace.energy_coef
    else:
        coef = 0.5 * (problem.sigma1 - gamma)
    xs, ys = trace.xs, trace.ys
    out = []
    for k in range(min(len(xs) - 1, len(ys))):
        x, z, y = xs[k + 1], xs[k], ys[k]
        conj = float(y @ z) - problem.eval_f2(z)
        out.append(problem.eval_f1(x) - float(x @ y) + conj + coef * _sq(x - z))
    return np.array(out)


def criticality_residual(trace):
    """Final step length ``||x^K - x^{K-1}||``."""
    if not trace.records:
        raise ValueError("empty trace")
    return trace.records[-1].step_norm
