"""Tracking the KL energy along a run.

E(x, y, z) = f1(x) - <x, y> + f2*(y) + (sigma1 - gamma)/2 ||x - z||^2 is
evaluated without a conjugate oracle via f2*(y^k) = <y^k, x^k> - f2(x^k).
Along the exact inertial method it drops by at least
(sigma1 + sigma2 - 2 gamma)/2 times the previous squared step.  The TV
subproblems are only solved to a certified duality gap, so late steps can
show a small rise; it stays below twice that gap.

Run:  python3 demos/06_energy_monitor.py
"""
import numpy as np

from dckit import SolverConfig, energy_along_trace, run
from dckit.imaging import PhiFamily, add_gaussian_noise, test_image
from dckit.problems import build_denoise_problem

X = test_image(48)
Y = add_gaussian_noise(X, 0.2, 1)
prob = build_denoise_problem(Y, 1.0, PhiFamily("log", 4))
tr = run(prob, Y.ravel(), SolverConfig(algorithm="RInDCA_E", store_y=True, store_x=True),
         max_outer_iters=15)
E = energy_along_trace(prob, tr)
drop = 0.5 * (prob.sigma1 + prob.sigma2 - 2 * tr.gamma)
steps = tr.column("step_norm")
eps = tr.column("epsilon_used")
print(" k          f            E     E drop  guaranteed    2*gap")
for k in range(1, len(E)):
    print(f"{k:2d} {tr.records[k + 1].f_value:12.5f} {E[k]:12.5f} {E[k - 1] - E[k]:10.5f} "
          f"{drop * steps[k] ** 2:10.5f} {2 * eps[k + 1]:8.5f}")
print("f - E at the last step:", tr.records[-1].f_value - E[-1])
