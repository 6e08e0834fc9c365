"""Backend selection for the micro-rotation kernel.

The compiled 128-bit kernel is used when it imports; otherwise the
pure-Python one.  ``HYPCORDIC_KERNEL=python`` forces the fallback.
Both produce bit-identical results.
"""

from __future__ import annotations

import os

import numpy as np

from . import _pykernel

_M64 = (1 << 64) - 1

try:
    if os.environ.get("HYPCORDIC_KERNEL", "").lower() == "python":
        raise ImportError("pure-Python kernel requested")
    from . import _ckernel
except ImportError:
    _ckernel = None

BACKEND = "python" if _ckernel is None else "compiled"


def _split(values):
    values = [int(v) for v in values]
    hi = np.fromiter((v >> 64 for v in values), dtype=np.int64, count=len(values))
    lo = np.fromiter((v & _M64 for v in values), dtype=np.uint64, count=len(values))
    return hi, lo


def _join(hi, lo):
    return [(h << 64) | l for h, l in zip(hi.tolist(), lo.tolist())]


def run_batch_compiled(xs, ys, zs, shifts, negative, thetas, vectoring, bits):
    if _ckernel is None:
        raise RuntimeError("compiled kernel is not available")
    x_hi, x_lo = _split(xs)
    y_hi, y_lo = _split(ys)
    z_hi, z_lo = _split(zs)
    t_hi, t_lo = _split(thetas)
    _ckernel.run_limbs(
        x_hi, x_lo, y_hi, y_lo, z_hi, z_lo,
        np.asarray(shifts, dtype=np.int32),
        np.asarray(negative, dtype=np.uint8),
        t_hi, t_lo, bool(vectoring), int(bits),
    )
    return _join(x_hi, x_lo), _join(y_hi, y_lo), _join(z_hi, z_lo)


run_batch_python = _pykernel.run_batch
run_batch = run_batch_python if _ckernel is None else run_batch_compiled
step = _pykernel.step
