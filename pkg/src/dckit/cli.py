"""Command-line experiment runner.

Subcommands::

    dckit denoise  [--image PGM] --mu 0.95 --algorithm RInDCA_E --out DIR
    dckit deblur   [--image PGM] --mu 1.35 --a 8 --algorithm InDCA_E --out DIR
    dckit signal   --n 200 --noise 0.1 --mu 2 --out DIR
    dckit bounds   --sigma1 1 2 3 4 --sigma2 1 --lambdas 0.05 0.1 ...
    dckit toy      --x0 0.3 --algorithm RInDCA_E --out DIR

``--config FILE`` reads ``key=value`` lines (keys are flag names without the
leading dashes); explicit flags win over the file, the file wins over
defaults.  ``DCKIT_SEED`` in the environment overrides ``--seed``.

Exit codes: 0 success, 1 unreadable/malformed input image, 2 invalid
configuration (the validator report is printed to stderr).
"""
from __future__ import annotations

import argparse
import concurrent.futures
import csv
import dataclasses
import io
import json
import os
import pathlib
import sys
import time

import numpy as np

from .core import Algorithm, SolverConfig, Termination, validate_problem
from .exceptions import InvalidConfig, InvalidLambda, InvalidModulus, ParseError
from .imaging import (
    PhiFamily,
    add_gaussian_noise,
    convolve,
    disk_kernel,
    pgm_read,
    pgm_write,
    resize,
    ssim,
    test_image,
)
from .problems import (
    build_deblur_problem,
    build_denoise_problem,
    build_signal1d_problem,
    build_toy_1d,
)
from .solvers import gamma_sup_inexact, run

TRACE_COLUMNS = ["iter", "f", "step_norm", "lyapunov", "energy_E", "epsilon", "ssim", "elapsed_ms"]
BOUND_COLUMNS = ["sigma1", "sigma2", "lambda", "H1", "H2", "t_star", "case"]
ALGORITHMS = ["DCA", "SDCA", "RInDCA_E", "InDCA_E", "RInDCA_N", "InDCA_N"]


class UsageError(Exception):
    """Invalid flag combination detected after parsing."""


def _fmt(v):
    """Shortest round-trip decimal; empty for missing values."""
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def write_trace(path, trace, record_time=False):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_COLUMNS)
        for r in trace.records:
            w.writerow([
                r.k, _fmt(r.f_value), _fmt(r.step_norm), _fmt(r.lyapunov), _fmt(r.energy_E),
                _fmt(r.epsilon_used), _fmt(r.metric),
                _fmt(1000.0 * r.elapsed) if record_time else "",
            ])


def _write_timing(path, trace):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["iter", "elapsed_ms", "inner_iters"])
        for r in trace.records:
            w.writerow([r.k, _fmt(1000.0 * r.elapsed), r.inner_iters])


def _solver_config(args):
    """Map the CLI algorithm name onto a :class:`SolverConfig`."""
    name = args.algorithm
    indca = name.startswith("InDCA")
    alg = {"DCA": Algorithm.DCA, "SDCA": Algorithm.SDCA, "RInDCA_E": Algorithm.RINDCA_E,
           "InDCA_E": Algorithm.RINDCA_E, "RInDCA_N": Algorithm.RINDCA_N,
           "InDCA_N": Algorithm.RINDCA_N}[name]
    gamma = args.gamma
    if alg == Algorithm.SDCA and gamma is None:
        gamma = 1.0
    return SolverConfig(
        algorithm=alg, gamma=gamma, gamma_frac=args.gamma_frac, lam=args.lam,
        indca=indca, max_outer_iters=args.iters, inner_stop=args.inner_stop,
        inner_max_iters=args.inner_max_iters, store_x=False,
    )


def _solve(problem, x0, config, metric=None):
    report = validate_problem(problem, config)
    if not report.valid:
        raise InvalidConfig(report)
    return run(problem, x0, config, metric=metric)


def _run_json(out, args, config, trace, extra):
    doc = {
        "command": args.command,
        "arguments": {k: v for k, v in sorted(vars(args).items()) if k not in ("func",)},
        "solver": config.to_dict(),
        "gamma": trace.gamma,
        "termination": trace.termination.value,
        "iterations": trace.iterations,
        "final_f": trace.records[-1].f_value,
        "violations": [list(v) for v in trace.violations],
        "notes": trace.notes,
    }
    doc.update(extra)
    with open(out / "run.json", "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")


def _load_image(args):
    if args.image:
        X = pgm_read(args.image)
    else:
        X = test_image(max(args.size, 11))
    return resize(X, args.size)


def _finish(out, args, config, trace, extra=None):
    write_trace(out / "trace.csv", trace, args.record_time)
    _write_timing(out / "timing.csv", trace)
    _run_json(out, args, config, trace, extra or {})


def cmd_denoise(args):
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    X = _load_image(args)
    Y = add_gaussian_noise(X, args.noise, args.seed)
    problem = build_denoise_problem(Y, args.mu, PhiFamily(args.phi, args.a))
    config = _solver_config(args)
    trace = _solve(problem, Y.ravel(), config, lambda x: ssim(x.reshape(X.shape), X))
    pgm_write(out / "observed.pgm", Y)
    pgm_write(out / "recovered.pgm", problem.as_grid(trace.final_point))
    _finish(out, args, config, trace)
    return 0


def cmd_deblur(args):
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    X = _load_image(args)
    if args.identity_kernel:
        kernel = np.ones((1, 1))
        B = X.copy()
    else:
        kernel = disk_kernel(args.radius)
        B = convolve(X, kernel)
    t = args.t
    if t is None:
        t = args.mu if args.identity_kernel else args.mu + 2.0
    Y = add_gaussian_noise(B, args.noise, args.seed)
    problem = build_deblur_problem(Y, args.mu, t, kernel, PhiFamily(args.phi, args.a))
    config = _solver_config(args)
    trace = _solve(problem, Y.ravel(), config, lambda x: ssim(x.reshape(X.shape), X))
    pgm_write(out / "observed.pgm", Y)
    pgm_write(out / "recovered.pgm", problem.as_grid(trace.final_point))
    _finish(out, args, config, trace, {"t": t, "sigma1": problem.sigma1,
                                       "sigma2": problem.sigma2})
    return 0


def piecewise_constant_signal(n, seed, pieces=None):
    """Seeded piecewise-constant signal with values in [0, 1]."""
    rng = np.random.default_rng(seed)
    pieces = pieces or max(2, n // 25)
    cuts = np.sort(rng.choice(np.arange(1, n), size=min(pieces - 1, n - 1), replace=False))
    levels = rng.uniform(0.0, 1.0, size=cuts.size + 1)
    return levels[np.searchsorted(cuts, np.arange(n), side="right")]


def cmd_signal(args):
    if args.n < 2:
        raise UsageError("n must be at least 2")
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    truth = piecewise_constant_signal(args.n, args.seed)
    # noise draws are decoupled from the signal draws
    obs = add_gaussian_noise(truth, args.noise, args.seed + 1)
    problem = build_signal1d_problem(obs, args.mu, PhiFamily(args.phi, args.a))
    config = _solver_config(args)
    trace = _solve(problem, obs, config)
    with open(out / "signals.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["i", "truth", "observed", "recovered"])
        for i, (a, b, c) in enumerate(zip(truth, obs, trace.final_point)):
            w.writerow([i, _fmt(a), _fmt(b), _fmt(c)])
    err = float(np.max(np.abs(trace.final_point - truth)))
    _finish(out, args, config, trace, {"max_abs_error": err})
    return 0


def cmd_toy(args):
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    problem = build_toy_1d()
    config = _solver_config(args)
    config.step_tol = args.step_tol
    trace = _solve(problem, np.array([args.x0]), config)
    _finish(out, args, config, trace, {"final_point": float(trace.final_point[0])})
    return 0


def cmd_bounds(args):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(BOUND_COLUMNS)
    lams = args.lambdas
    if lams is None:
        lams = [round(0.05 * i, 10) for i in range(1, 20)]
    for s1 in args.sigma1:
        for lam in lams:
            rep = gamma_sup_inexact(s1, args.sigma2, lam)
            w.writerow([_fmt(s1), _fmt(args.sigma2), _fmt(lam), _fmt(rep.h1), _fmt(rep.h2),
                        _fmt(rep.t_star), rep.case])
    sys.stdout.write(buf.getvalue())
    return 0


def _common(p, iters=20):
    p.add_argument("--config", help="key=value file; flags override it")
    p.add_argument("--algorithm", choices=ALGORITHMS, default="RInDCA_E")
    p.add_argument("--gamma", type=float, default=None, help="explicit step (SDCA default 1)")
    p.add_argument("--gamma-frac", type=float, default=0.99,
                   help="fraction of the step-size supremum when --gamma is absent")
    p.add_argument("--lam", type=float, default=0.5, help="inexactness level of RInDCA_N")
    p.add_argument("--iters", type=int, default=iters)
    p.add_argument("--inner-stop", type=float, default=1e-4)
    p.add_argument("--inner-max-iters", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="out")
    p.add_argument("--record-time", action="store_true",
                   help="fill elapsed_ms in trace.csv (breaks byte-reproducibility)")
    p.add_argument("--sweep", type=int, default=0,
                   help="run N seeds (seed+i) into OUT/run_i on worker threads")
    p.add_argument("--workers", type=int, default=None)


def _imaging(p, mu):
    p.add_argument("--image", help="PGM file; a built-in phantom is used when absent")
    p.add_argument("--size", type=int, default=64)
    p.add_argument("--mu", type=float, default=mu)
    p.add_argument("--phi", choices=["log", "rat", "atan", "exp"], default="atan")
    p.add_argument("--noise", type=float, default=80 / 255)


def build_parser():
    parser = argparse.ArgumentParser(prog="dckit", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("denoise", help="TV_phi denoising")
    _common(p)
    _imaging(p, 0.95)
    p.add_argument("--a", type=float, default=6.0)
    p.set_defaults(func=cmd_denoise)

    p = sub.add_parser("deblur", help="TV_phi denoising and deblurring")
    _common(p)
    _imaging(p, 1.35)
    p.add_argument("--a", type=float, default=8.0)
    p.add_argument("--t", type=float, default=None, help="shift (default mu+2, or mu with "
                   "--identity-kernel)")
    p.add_argument("--radius", type=int, default=3)
    p.add_argument("--identity-kernel", action="store_true")
    p.set_defaults(func=cmd_deblur)

    p = sub.add_parser("signal", help="1-D piecewise-constant signal recovery")
    _common(p, iters=50)
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--noise", type=float, default=0.1)
    p.add_argument("--mu", type=float, default=2.0)
    p.add_argument("--phi", choices=["log", "rat", "atan", "exp"], default="atan")
    p.add_argument("--a", type=float, default=6.0)
    p.set_defaults(func=cmd_signal)

    p = sub.add_parser("toy", help="x^2 - |x| in one dimension")
    _common(p, iters=200)
    p.add_argument("--x0", type=float, default=0.3)
    p.add_argument("--step-tol", type=float, default=1e-8)
    p.set_defaults(func=cmd_toy)

    p = sub.add_parser("bounds", help="step-size suprema table as CSV")
    p.add_argument("--config")
    p.add_argument("--sigma1", type=float, nargs="+", default=[1.0, 2.0, 3.0, 4.0])
    p.add_argument("--sigma2", type=float, default=1.0)
    p.add_argument("--lambdas", type=float, nargs="+", default=None)
    p.set_defaults(func=cmd_bounds)
    return parser


_BOOL_TRUE = {"1", "true", "yes", "on"}
_BOOL_FALSE = {"0", "false", "no", "off", ""}


def read_config_file(path):
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    cfg = {}
    with open(path) as fh:
        for n, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{n}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            cfg[key.replace("-", "_")] = value
    return cfg


def _apply_config(parser, sub, argv):
    """Re-parse with the config file's values installed as defaults."""
    args = parser.parse_args(argv)
    if not getattr(args, "config", None):
        return args
    cfg = read_config_file(args.config)
    actions = {a.dest: a for a in sub.choices[args.command]._actions}
    defaults = {}
    for key, value in cfg.items():
        act = actions.get(key)
        if act is None or key in ("help", "config"):
            raise UsageError(f"unknown config key {key!r}")
        if isinstance(act, argparse._StoreTrueAction):
            low = value.lower()
            if low not in _BOOL_TRUE | _BOOL_FALSE:
                raise UsageError(f"config key {key!r}: expected a boolean, got {value!r}")
            defaults[key] = low in _BOOL_TRUE
        elif act.nargs in ("+", "*"):
            defaults[key] = [act.type(v) if act.type else v for v in value.replace(",", " ").split()]
        else:
            defaults[key] = act.type(value) if act.type else value
    sub.choices[args.command].set_defaults(**defaults)
    return parser.parse_args(argv)


def _sweep(args):
    base = pathlib.Path(args.out)
    jobs = []
    for i in range(args.sweep):
        a = argparse.Namespace(**vars(args))
        a.seed, a.out, a.sweep = args.seed + i, str(base / f"run_{i}"), 0
        jobs.append(a)
    with concurrent.futures.ThreadPoolExecutor(max_workers=args.workers) as pool:
        codes = list(pool.map(lambda a: a.func(a), jobs))
    return max(codes)


def main(argv=None):
    parser = build_parser()
    sub = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    try:
        args = _apply_config(parser, sub, argv)
        env_seed = os.environ.get("DCKIT_SEED")
        if env_seed is not None and hasattr(args, "seed"):
            args.seed = int(env_seed)
        if getattr(args, "sweep", 0):
            return _sweep(args)
        return args.func(args)
    except ParseError as exc:
        print(f"dckit: cannot read image: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"dckit: {exc}", file=sys.stderr)
        return 1
    except InvalidConfig as exc:
        print("dckit: invalid configuration", file=sys.stderr)
        for v in exc.report.violations:
            print(f"  - {v}", file=sys.stderr)
        return 2
    except (InvalidModulus, InvalidLambda, UsageError, ValueError) as exc:
        print(f"dckit: invalid configuration: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
