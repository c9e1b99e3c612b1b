"""Disk blur kernel and convolution with symmetric boundary extension."""
from __future__ import annotations

import numpy as np
from scipy import signal

__all__ = ["convolve", "convolve_adjoint", "disk_kernel", "operator_norm"]


def disk_kernel(radius, subsamples=16):
    """Normalized area coverage of a disk of ``radius`` pixels.

    Each of the ``(2r+1)^2`` cells is sampled on a ``subsamples`` x
    ``subsamples`` midpoint grid; the kernel is the covered fraction,
    rescaled to sum to one.
    """
    if radius < 1:
        raise ValueError("radius must be >= 1")
    r = int(radius)
    offs = (np.arange(subsamples) + 0.5) / subsamples - 0.5
    centers = np.arange(-r, r + 1, dtype=float)
    # fine sample coordinates along one axis, grouped by cell
    fine = (centers[:, None] + offs[None, :]).ravel()
    inside = (fine[:, None] ** 2 + fine[None, :] ** 2) <= r * r
    size = 2 * r + 1
    cover = inside.reshape(size, subsamples, size, subsamples).mean(axis=(1, 3))
    return cover / cover.sum()


def _pad_indices(n, p):
    return np.pad(np.arange(n), p, mode="symmetric")


def convolve(X, kernel):
    """``kernel * X`` with half-sample symmetric padding; output has X's shape."""
    X = np.asarray(X, dtype=float)
    kernel = np.asarray(kernel, dtype=float)
    pr, pc = kernel.shape[0] // 2, kernel.shape[1] // 2
    padded = np.pad(X, ((pr, pr), (pc, pc)), mode="symmetric")
    return signal.convolve(padded, kernel, mode="valid")


def convolve_adjoint(Y, kernel):
    """Adjoint of :func:`convolve` for the same kernel."""
    Y = np.asarray(Y, dtype=float)
    kernel = np.asarray(kernel, dtype=float)
    m, n = Y.shape
    pr, pc = kernel.shape[0] // 2, kernel.shape[1] // 2
    full = signal.correlate(Y, kernel, mode="full")
    rows = np.zeros((m, full.shape[1]))
    np.add.at(rows, _pad_indices(m, pr), full)
    out = np.zeros((n, m))
    np.add.at(out, _pad_indices(n, pc), rows.T)
    return out.T


def operator_norm(shape, kernel, iters=200, seed=0):
    """Power-iteration estimate of the spectral norm of :func:`convolve`."""
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(shape)
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(iters):
        w = convolve_adjoint(convolve(v, kernel), kernel)
        lam = np.linalg.norm(w)
        if lam == 0:
            return 0.0
        v = w / lam
    return float(np.sqrt(lam))
