"""Seeded noise and deterministic test images."""
from __future__ import annotations

import numpy as np

__all__ = ["add_gaussian_noise", "center_crop", "resize", "test_image"]


def add_gaussian_noise(X, sigma, seed):
    """``X + N(0, sigma^2)`` i.i.d. per pixel; no clamping."""
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    X = np.asarray(X, dtype=float)
    if sigma == 0:
        return X.copy()
    rng = np.random.default_rng(seed)
    return X + sigma * rng.standard_normal(X.shape)


def test_image(size=64):
    """Piecewise-smooth gray-scale phantom in [0, 1].

    Flat regions, sharp edges of several orientations, a smooth ramp and a
    band of fine stripes, so both the TV prior and the fidelity term matter.
    """
    n = int(size)
    y, x = np.mgrid[0:n, 0:n] / n
    img = 0.25 + 0.2 * x
    img = np.where((x - 0.3) ** 2 + (y - 0.32) ** 2 < 0.04, 0.85, img)
    img = np.where((np.abs(x - 0.72) < 0.16) & (np.abs(y - 0.28) < 0.12), 0.1, img)
    tri = (y > 0.55) & (y < 0.92) & (np.abs(x - 0.3) < (y - 0.55) * 0.6)
    img = np.where(tri, 0.65, img)
    stripes = (x > 0.58) & (x < 0.92) & (y > 0.58) & (y < 0.9)
    img = np.where(stripes, 0.5 + 0.3 * np.sign(np.sin(2 * np.pi * 6 * (x + y))), img)
    return np.clip(img, 0.0, 1.0)


def center_crop(X, size):
    m, n = X.shape
    s = min(size, m, n)
    r0, c0 = (m - s) // 2, (n - s) // 2
    return X[r0:r0 + s, c0:c0 + s]


def resize(X, size):
    """Center-crop to a square, then box-downsample (integer factor) to ``size``."""
    X = np.asarray(X, dtype=float)
    s = min(X.shape)
    X = center_crop(X, s)
    if s <= size:
        return X
    f = s // size
    X = center_crop(X, f * size)
    return X.reshape(size, f, size, f).mean(axis=(1, 3))


# keep pytest from collecting the phantom generator when it is imported in tests
test_image.__test__ = False
