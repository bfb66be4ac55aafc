"""Small numerical helpers shared across modules."""

import numpy as np
from scipy.optimize import brentq

TWO_PI = 2.0 * np.pi


def uniform_grid(n):
    return np.arange(n) * (TWO_PI / n)


def unit(v, axis=-1):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v, axis=axis, keepdims=True)


def dot(a, b):
    return np.einsum("...i,...i->...", a, b)


def det3(a, b, c):
    return dot(np.cross(a, b), c)


def det2(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def periodic_roots(f, n=4096, xtol=1e-12):
    """Zeros of a smooth 2pi-periodic scalar function.

    ``f`` must accept arrays. Sign changes on an ``n``-point grid are
    bracketed and refined with Brent's method. Returns ``(roots, touches)``
    where ``touches`` lists grid points whose neighbours have |f| larger
    and the same sign and whose value is tiny relative to max |f|, i.e.
    candidate double zeros that were not counted.
    """
    t = uniform_grid(n)
    v = np.asarray(f(t), dtype=float)
    scale = float(np.max(np.abs(v))) or 1.0
    nxt = np.roll(v, -1)
    roots = []
    exact = np.flatnonzero(v == 0.0)
    for k in np.flatnonzero(v * nxt < 0):
        a = t[k]
        b = a + TWO_PI / n
        roots.append(brentq(lambda x: float(f(np.array([x]))[0]), a, b, xtol=xtol) % TWO_PI)
    for k in exact:
        roots.append(t[k])
    prv = np.roll(v, 1)
    av = np.abs(v)
    local_min = (av <= np.abs(prv)) & (av <= np.abs(nxt)) & (v * nxt > 0) & (v * prv > 0)
    touches = t[local_min & (av < 1e-6 * scale)]
    return np.sort(np.asarray(roots, dtype=float)), touches


def winding(angle_steps):
    """Integer winding number from wrapped angle increments."""
    total = float(np.sum(angle_steps)) / TWO_PI
    return int(np.rint(total)), total


def wrap(a):
    return (np.asarray(a) + np.pi) % TWO_PI - np.pi


def uniform_sphere(rng, n):
    v = rng.normal(size=(n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def fibonacci_sphere(n):
    k = np.arange(n) + 0.5
    z = 1.0 - 2.0 * k / n
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    phi = np.pi * (3.0 - np.sqrt(5.0)) * k
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)


def fold_spectrum(coef, n):
    """Fold the rows of ``coef`` (modes 0..K-1 along the last axis) modulo ``n``."""
    coef = np.asarray(coef)
    k = coef.shape[-1]
    if k <= n:
        out = np.zeros(coef.shape[:-1] + (n,), dtype=complex)
        out[..., :k] = coef
        return out
    pad = (-k) % n
    if pad:
        coef = np.concatenate([coef, np.zeros(coef.shape[:-1] + (pad,), dtype=complex)], axis=-1)
    return coef.reshape(coef.shape[:-1] + (-1, n)).sum(axis=-2)
