"""Deblurring with a shifted decomposition that makes f2 strongly convex.

With t = mu + 2 and the disk kernel (||L|| <= 1), f1 is t-strongly convex
and f2 is 2-strongly convex, so the classical InDCA step range opens up as
well: gamma < 1 for InDCA_e versus gamma < (mu + 4)/2 for RInDCA_e.

Run:  python3 demos/04_deblur.py [mu] [a] [seed]
"""
import sys

from dckit import SolverConfig, run
from dckit.imaging import PhiFamily, add_gaussian_noise, convolve, disk_kernel, ssim, test_image
from dckit.problems import build_deblur_problem

mu = float(sys.argv[1]) if len(sys.argv) > 1 else 1.35
a = float(sys.argv[2]) if len(sys.argv) > 2 else 8.0
seed = int(sys.argv[3]) if len(sys.argv) > 3 else 0

X = test_image(64)
K = disk_kernel(3)
Y = add_gaussian_noise(convolve(X, K), 80 / 255, seed)
prob = build_deblur_problem(Y, mu, mu + 2, K, PhiFamily("atan", a))
print(f"sigma1={prob.sigma1:g}, sigma2={prob.sigma2:g}; observed SSIM {ssim(Y, X):.4f}")
metric = lambda x: ssim(x.reshape(X.shape), X)  # noqa: E731

for label, cfg in [
    ("DCA", SolverConfig(algorithm="DCA")),
    ("InDCA_e", SolverConfig(algorithm="RInDCA_E", indca=True)),
    ("RInDCA_e", SolverConfig(algorithm="RInDCA_E")),
    ("RInDCA_n", SolverConfig(algorithm="RInDCA_N", lam=0.5)),
]:
    tr = run(prob, Y.ravel(), cfg, metric=metric)
    last = tr.records[-1]
    print(f"{label:9s} gamma={tr.gamma:.4f}  f={last.f_value:.4f}  SSIM={last.metric:.4f}")
