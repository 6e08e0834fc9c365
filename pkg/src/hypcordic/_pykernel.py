"""Pure-Python micro-rotation kernel.

Batches are numpy object arrays of Python ints, so every B up to 128 stays
exact while the per-iteration work is still vectorised over samples.
"""

from __future__ import annotations

import numpy as np


def _wrap(v, half, mask):
    return ((v + half) & mask) - half


def run_batch(xs, ys, zs, shifts, negative, thetas, vectoring, bits):
    """Run every micro-rotation of the schedule over a batch of raw states.

    ``shifts``, ``negative`` and ``thetas`` describe the executed iterations
    in order: a negative-stage step scales by ``v - (v >> s)``, a
    positive-stage step by ``v >> s``.  Returns lists of raw ints.
    """
    half = 1 << (bits - 1)
    mask = (half << 1) - 1
    x = np.array([int(v) for v in xs], dtype=object)
    y = np.array([int(v) for v in ys], dtype=object)
    z = np.array([int(v) for v in zs], dtype=object)
    if x.size == 0:
        return [], [], []
    for s, neg, theta in zip(shifts, negative, thetas):
        if neg:
            tx = _wrap(x - (x >> s), half, mask)
            ty = _wrap(y - (y >> s), half, mask)
        else:
            tx = x >> s
            ty = y >> s
        if vectoring:
            d_neg = (x < 0) == (y < 0)
        else:
            d_neg = z < 0
        x, y, z = (
            _wrap(np.where(d_neg, x - ty, x + ty), half, mask),
            _wrap(np.where(d_neg, y - tx, y + tx), half, mask),
            _wrap(np.where(d_neg, z + theta, z - theta), half, mask),
        )
    return x.tolist(), y.tolist(), z.tolist()


def step(x, y, z, s, neg, theta, vectoring, bits):
    """One micro-rotation on scalar raws; used for iteration traces."""
    half = 1 << (bits - 1)
    mask = (half << 1) - 1
    if neg:
        tx = _wrap(x - (x >> s), half, mask)
        ty = _wrap(y - (y >> s), half, mask)
    else:
        tx, ty = x >> s, y >> s
    d_neg = ((x < 0) == (y < 0)) if vectoring else z < 0
    if d_neg:
        return (_wrap(x - ty, half, mask), _wrap(y - tx, half, mask),
                _wrap(z + theta, half, mask))
    return (_wrap(x + ty, half, mask), _wrap(y + tx, half, mask),
            _wrap(z - theta, half, mask))
