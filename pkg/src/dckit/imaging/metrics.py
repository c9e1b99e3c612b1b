"""Structural similarity index."""
from __future__ import annotations

import numpy as np
from scipy import signal

from ..exceptions import SizeMismatch

__all__ = ["gaussian_window", "ssim", "ssim_map"]


def gaussian_window(size=11, sigma=1.5):
    ax = np.arange(size) - (size - 1) / 2
    g = np.exp(-(ax**2) / (2 * sigma**2))
    w = np.outer(g, g)
    return w / w.sum()


def ssim_map(X, Y, data_range=1.0, window=None, k1=0.01, k2=0.03):
    """Local SSIM over every full placement of the window ('valid' region)."""
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if X.shape != Y.shape:
        raise SizeMismatch(f"ssim inputs differ in shape: {X.shape} vs {Y.shape}")
    w = gaussian_window() if window is None else window
    if X.shape[0] < w.shape[0] or X.shape[1] < w.shape[1]:
        raise SizeMismatch(f"image {X.shape} smaller than the SSIM window {w.shape}")
    c1 = (k1 * data_range) ** 2
    c2 = (k2 * data_range) ** 2

    def filt(a):
        return signal.correlate(a, w, mode="valid")

    mx, my = filt(X), filt(Y)
    mxx, myy, mxy = mx * mx, my * my, mx * my
    sxx = filt(X * X) - mxx
    syy = filt(Y * Y) - myy
    sxy = filt(X * Y) - mxy
    return ((2 * mxy + c1) * (2 * sxy + c2)) / ((mxx + myy + c1) * (sxx + syy + c2))


def ssim(X, Y, data_range=1.0):
    """Mean SSIM with an 11x11 Gaussian window (sigma 1.5), K1=0.01, K2=0.03."""
    return float(ssim_map(X, Y, data_range).mean())
