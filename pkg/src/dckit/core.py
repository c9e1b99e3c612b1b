"""Problem model, solver configuration and trace containers.

A DC program is ``min f(x) = f1(x) - f2(x)`` over flattened real vectors.
Everything a solver needs to know about a concrete problem lives in a
:class:`DcProblem`: value oracles for both components, one subgradient
selection of ``f2``, a certified solver for the convex subproblem, and the
strong-convexity moduli of the two components.
"""
from __future__ import annotations

import dataclasses
import enum
import math
from typing import Any, Callable, Optional

import numpy as np

from .exceptions import DomainError, InvalidConfig

__all__ = [
    "Algorithm",
    "DcProblem",
    "IterationRecord",
    "SolverConfig",
    "Termination",
    "Trace",
    "ValidationReport",
    "evaluate_objective",
    "lyapunov_value",
    "regularize",
    "resolve_gamma",
    "resolve_t",
    "validate_problem",
]


class Algorithm(str, enum.Enum):
    DCA = "DCA"
    SDCA = "SDCA"
    RINDCA_E = "RInDCA_E"
    RINDCA_N = "RInDCA_N"


class Termination(str, enum.Enum):
    STEP_TOL = "StepTol"
    MAX_ITERS = "MaxIters"
    DIVERGENCE_GUARD = "DivergenceGuard"
    SUBSOLVER_FAILURE = "SubsolverFailure"


@dataclasses.dataclass(frozen=True)
class DcProblem:
    """Oracle bundle for ``f = f1 - f2``.

    ``solve_subproblem(c, eps_target, *, reg=0.0, warm=None, accept=None)``
    approximately minimizes ``f1(x) + reg/2 ||x||^2 - <c, x>`` and returns a
    :class:`~dckit.subsolvers.SubproblemResult` whose ``gap`` bounds the
    suboptimality of the returned point.  ``eps_target = 0`` asks the solver to
    run to its own inner tolerance.  ``accept(point, gap) -> bool``, when
    given, is polled by the inner solver and stops it early once true.
    ``warm`` is an opaque solver state from a previous result (``.state``).
    """

    eval_f1: Callable[[np.ndarray], float]
    eval_f2: Callable[[np.ndarray], float]
    subgrad_f2: Callable[[np.ndarray], np.ndarray]
    solve_subproblem: Callable[..., Any]
    sigma1: float
    sigma2: float
    dimension: int
    name: str = "problem"
    shape: Optional[tuple] = None
    meta: dict = dataclasses.field(default_factory=dict)

    def as_grid(self, x):
        """Reshape a flat iterate to the problem's natural shape."""
        return np.asarray(x).reshape(self.shape) if self.shape else np.asarray(x)


@dataclasses.dataclass
class SolverConfig:
    """Outer-solver settings.

    ``gamma`` fixes the inertial step explicitly; otherwise
    ``gamma_frac`` times the algorithm's supremum bound is used.  ``t`` is a
    number in (0, 1] or ``"auto"``.  ``indca=True`` restricts the refined
    algorithms to the classical InDCA step-size ranges.
    """

    algorithm: Algorithm = Algorithm.RINDCA_E
    gamma: Optional[float] = None
    gamma_frac: float = 0.99
    lam: float = 0.5
    t: Any = "auto"
    indca: bool = False
    max_outer_iters: int = 20
    step_tol: float = 1e-8
    inner_stop: float = 1e-4
    inner_max_iters: int = 2000
    divergence_guard: float = 1e8
    monitor: str = "warn"
    assert_tol: float = 1e-9
    store_y: bool = False
    store_x: bool = False
    track_energy: bool = True

    def __post_init__(self):
        self.algorithm = Algorithm(self.algorithm)
        if self.monitor not in ("warn", "abort", "off"):
            raise ValueError(f"monitor must be warn/abort/off, got {self.monitor!r}")

    def to_dict(self):
        d = dataclasses.asdict(self)
        d["algorithm"] = self.algorithm.value
        return d


@dataclasses.dataclass
class IterationRecord:
    k: int
    f_value: float
    step_norm: float
    lyapunov: float
    energy_E: Optional[float] = None
    epsilon_used: float = 0.0
    inner_iters: int = 0
    elapsed: float = 0.0
    metric: Optional[float] = None


@dataclasses.dataclass
class Trace:
    records: list
    termination: Termination
    final_point: np.ndarray
    algorithm: Algorithm = Algorithm.DCA
    gamma: float = 0.0
    lyapunov_modulus: float = 0.0
    energy_coef: float = 0.0
    xs: Optional[list] = None
    ys: Optional[list] = None
    violations: list = dataclasses.field(default_factory=list)
    notes: list = dataclasses.field(default_factory=list)

    def column(self, name):
        return np.array([getattr(r, name) for r in self.records], dtype=float)

    @property
    def f_values(self):
        return self.column("f_value")

    @property
    def iterations(self):
        return self.records[-1].k if self.records else 0


@dataclasses.dataclass
class ValidationReport:
    violations: list
    notes: list

    @property
    def valid(self):
        return not self.violations

    def raise_if_invalid(self):
        if self.violations:
            raise InvalidConfig(self)


def evaluate_objective(problem, x):
    """Return ``f1(x) - f2(x)``; raise DomainError outside ``dom f1``."""
    v1 = problem.eval_f1(x)
    if not math.isfinite(v1):
        raise DomainError(f"{problem.name}: point outside the domain of f1")
    return v1 - problem.eval_f2(x)


def lyapunov_value(problem, gamma, x_k, x_prev):
    """``f(x_k) + (sigma1 + sigma2 - gamma)/2 * ||x_k - x_prev||^2``."""
    s = problem.sigma1 + problem.sigma2
    if not gamma < s / 2:
        raise ValueError(f"gamma={gamma} must be below (sigma1+sigma2)/2={s / 2}")
    d = np.asarray(x_k, dtype=float) - np.asarray(x_prev, dtype=float)
    return evaluate_objective(problem, x_k) + 0.5 * (s - gamma) * float(d.ravel() @ d.ravel())


def resolve_t(problem, config):
    """Return the t parameter for the inexact algorithm.

    ``"auto"`` picks the maximizer of the effective modulus over (0, 1]:
    ``min(1, sqrt(lam*sigma2/sigma1))``, with ``t = 1`` when ``sigma1 = 0``.
    InDCA mode always uses ``t = 1``.
    """
    if config.indca:
        return 1.0
    if isinstance(config.t, str):
        if config.t.lower() != "auto":
            raise ValueError(f"t must be a number or 'auto', got {config.t!r}")
        s1, s2 = problem.sigma1, problem.sigma2
        if s1 <= 0:
            return 1.0
        return min(1.0, math.sqrt(config.lam * s2 / s1))
    return float(config.t)


def effective_modulus(sigma1, sigma2, lam, t):
    """``sigma1*(1 - t) + sigma2 - lam*sigma2/t``."""
    return sigma1 * (1.0 - t) + sigma2 - lam * sigma2 / t


def gamma_supremum(problem, config):
    """Open upper bound on admissible inertial steps for ``config``.

    Returns ``None`` for algorithms without an inertial bound (DCA, SDCA).
    """
    s1, s2 = problem.sigma1, problem.sigma2
    alg = config.algorithm
    if alg == Algorithm.RINDCA_E:
        return s2 / 2 if config.indca else (s1 + s2) / 2
    if alg == Algorithm.RINDCA_N:
        return effective_modulus(s1, s2, config.lam, resolve_t(problem, config)) / 2
    return None


def validate_problem(problem, config):
    """Check the preconditions of ``config.algorithm`` on ``problem``.

    Report-only: nothing is raised and nothing is mutated.  Solvers call
    :meth:`ValidationReport.raise_if_invalid` on the result.
    """
    violations = []
    notes = ["level-boundedness of f is assumed, not verified"]
    s1, s2 = problem.sigma1, problem.sigma2
    alg = config.algorithm
    if s1 < 0 or s2 < 0:
        violations.append("strong-convexity moduli must be nonnegative")
    if alg == Algorithm.RINDCA_E:
        if config.indca and not s2 > 0:
            violations.append("sigma2>0 violated (InDCA needs a strongly convex f2)")
        elif not s1 + s2 > 0:
            violations.append("sigma1+sigma2>0 violated")
    if alg == Algorithm.RINDCA_N:
        if not 0 < config.lam < 1:
            violations.append(f"lambda={config.lam} not in (0,1)")
        if not s2 > 0:
            violations.append("sigma2>0 violated (inexact algorithm needs a strongly convex f2)")
        else:
            try:
                t = resolve_t(problem, config)
            except ValueError as exc:
                violations.append(str(exc))
            else:
                if not 0 < t <= 1:
                    violations.append(f"t={t} not in (0,1]")
                elif not effective_modulus(s1, s2, config.lam, t) > 0:
                    violations.append("effective modulus sigma_bar_t>0 violated")
    if alg == Algorithm.SDCA:
        if config.gamma is None or config.gamma < 0:
            violations.append("SDCA needs an explicit gamma >= 0")
    elif not violations and alg != Algorithm.DCA:
        sup = gamma_supremum(problem, config)
        if config.gamma is not None:
            if config.gamma < 0:
                violations.append(f"gamma={config.gamma} is negative")
            elif not config.gamma < sup:
                violations.append(f"gamma={config.gamma} >= supremum bound {sup}")
        elif not 0 <= config.gamma_frac < 1:
            violations.append(f"gamma_frac={config.gamma_frac} not in [0,1)")
    if config.max_outer_iters < 1:
        violations.append("max_outer_iters must be positive")
    for field in ("step_tol", "inner_stop", "divergence_guard"):
        if not getattr(config, field) > 0:
            violations.append(f"{field} must be positive")
    return ValidationReport(violations, notes)


def resolve_gamma(problem, config):
    """Inertial (or SDCA proximal) step actually used by a run."""
    alg = config.algorithm
    if alg == Algorithm.DCA:
        return 0.0
    if alg == Algorithm.SDCA:
        return float(config.gamma)
    if config.gamma is not None:
        return float(config.gamma)
    return config.gamma_frac * gamma_supremum(problem, config)


def regularize(problem, rho):
    """Add ``rho/2 ||x||^2`` to both DC components.

    The objective is unchanged; both moduli grow by ``rho``.
    """
    if rho < 0:
        raise ValueError("rho must be nonnegative")
    half = 0.5 * rho

    def eval_f1(x):
        return problem.eval_f1(x) + half * float(np.vdot(x, x))

    def eval_f2(x):
        return problem.eval_f2(x) + half * float(np.vdot(x, x))

    def subgrad_f2(x):
        return problem.subgrad_f2(x) + rho * np.asarray(x, dtype=float)

    def solve_subproblem(c, eps_target=0.0, *, reg=0.0, **kw):
        return problem.solve_subproblem(c, eps_target, reg=reg + rho, **kw)

    return dataclasses.replace(
        problem,
        eval_f1=eval_f1,
        eval_f2=eval_f2,
        subgrad_f2=subgrad_f2,
        solve_subproblem=solve_subproblem,
        sigma1=problem.sigma1 + rho,
        sigma2=problem.sigma2 + rho,
        name=f"{problem.name}+reg({rho:g})",
    )
