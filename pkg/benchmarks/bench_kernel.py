"""Compare the compiled and pure-Python micro-rotation kernels.

    python benchmarks/bench_kernel.py [--points 1000] [--repeat 3]

Runs exp (rotation) and ln (vectoring) batches through both backends for
a few widths, checks the outputs are identical and prints the timings.
"""

import argparse
import sys
import time
import warnings

from hypcordic import kernel
from hypcordic.cordic import CordicEngine, EngineParams, Mode, ProfileWarning
from hypcordic.dse import gen_stimuli
from hypcordic.fxnum import FxFormat, RoundingMode, quantize_raw

FORMATS = ((32, 12), (52, 32), (76, 32), (128, 64))


def _best(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench(points: int = 1000, repeat: int = 3):
    rows = []
    exp_pts = [p[0] for p in gen_stimuli("exp", 5, 40).points][:points]
    ln_pts = [p[0] for p in gen_stimuli("ln", 5, 40).points][:points]
    for b, fw in FORMATS:
        fmt = FxFormat(b, fw)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ProfileWarning)
            eng = CordicEngine(EngineParams(fmt, 5, 40))
        inv = [eng.inv_scale_raw] * len(exp_pts)
        jobs = {
            "rotation": (Mode.ROTATION, inv, inv,
                         [quantize_raw(v, fmt, RoundingMode.TRUNCATE) for v in exp_pts]),
            "vectoring": (Mode.VECTORING,
                          [quantize_raw(v + 1, fmt) for v in ln_pts],
                          [quantize_raw(v - 1, fmt) for v in ln_pts],
                          [0] * len(ln_pts)),
        }
        for name, (mode, xs, ys, zs) in jobs.items():
            t_py, r_py = _best(lambda: eng.run_raw(mode, xs, ys, zs, kernel.run_batch_python), repeat)
            if kernel.BACKEND == "compiled":
                t_c, r_c = _best(lambda: eng.run_raw(mode, xs, ys, zs, kernel.run_batch_compiled),
                                 repeat)
                if r_c != r_py:
                    raise AssertionError(f"backends disagree at [{b} {fw}] {name}")
            else:
                t_c = float("nan")
            rows.append((f"[{b} {fw}]", name, len(xs), t_py, t_c))
    return rows


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=1000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    print(f"compiled backend available: {kernel.BACKEND == 'compiled'}")
    print(f"{'format':>10} {'mode':>10} {'points':>7} {'python ms':>10} {'compiled ms':>12} {'speedup':>8}")
    for fmt, mode, n, t_py, t_c in bench(args.points, args.repeat):
        print(f"{fmt:>10} {mode:>10} {n:>7} {t_py * 1e3:>10.2f} {t_c * 1e3:>12.2f} {t_py / t_c:>8.1f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
