"""Certified inexact subproblems on l1 - l2 regression.

Each RInDCA_n step polls the inner FISTA run until its duality gap eps
satisfies eps <= lam * sigma2 / 2 * ||x_new - x_k||^2.  Smaller lam demands
more accurate solves but admits a larger inertial step.

Run:  python3 demos/05_inexact_l12.py
"""
import numpy as np

from dckit import SolverConfig, run
from dckit.problems import build_l12_problem

rng = np.random.default_rng(0)
A = rng.standard_normal((60, 100))
x_true = np.zeros(100)
x_true[rng.choice(100, 6, replace=False)] = rng.choice([-1.0, 1.0], 6)
b = A @ x_true + 0.01 * rng.standard_normal(60)
prob = build_l12_problem(A, b, 0.1, rho=1.0)
x0 = np.zeros(100)
print(f"sigma1={prob.sigma1:.4f} sigma2={prob.sigma2:.4f}")

for lam in (0.9, 0.5, 0.1, 0.01):
    tr = run(prob, x0, SolverConfig(algorithm="RInDCA_N", lam=lam), max_outer_iters=100)
    ok = all(r.epsilon_used <= 0.5 * lam * prob.sigma2 * r.step_norm**2 for r in tr.records[1:])
    print(f"lam={lam:<5} gamma={tr.gamma:.4f}  f={tr.records[-1].f_value:.6f}  "
          f"inner={sum(r.inner_iters for r in tr.records):6d}  certificates hold: {ok}")

tr = run(prob, x0, SolverConfig(algorithm="RInDCA_E"), max_outer_iters=100)
print(f"exact RInDCA_e      gamma={tr.gamma:.4f}  f={tr.records[-1].f_value:.6f}  "
      f"support={np.flatnonzero(np.abs(tr.final_point) > 1e-3).tolist()}")
print("true support:", np.flatnonzero(x_true).tolist())
