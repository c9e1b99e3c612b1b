"""How much room the refined step-size rule buys.

For the inexact algorithm the admissible inertial step is bounded by
sup_t sigma_bar(t)/2.  When lam*sigma2 < sigma1 this supremum exceeds the
classical (1 - lam) sigma2 / 2 by (sqrt(sigma1) - sqrt(lam sigma2))^2 / 2.

Run:  python3 demos/02_step_size_bounds.py
"""
import numpy as np

from dckit import gamma_sup_inexact

lams = np.linspace(0.05, 0.95, 10)
print("lambda " + " ".join(f"{f'H1({s1},1)':>9s}" for s1 in (1, 2, 3, 4)) + "      H2")
for lam in lams:
    reps = [gamma_sup_inexact(s1, 1.0, lam) for s1 in (1, 2, 3, 4)]
    print(f"{lam:6.2f} " + " ".join(f"{r.h1:9.4f}" for r in reps) + f" {reps[0].h2:7.4f}")

rep = gamma_sup_inexact(4, 1, 0.04)
print(f"\n(sigma1, sigma2, lambda) = (4, 1, 0.04): t* = {rep.t_star:g}, "
      f"H1 = {rep.h1:g}, H2 = {rep.h2:g}, exact-method bound = {rep.sup_exact:g}")
