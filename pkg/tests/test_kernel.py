import os
import random
import subprocess
import sys

import pytest

from hypcordic import kernel
from hypcordic.cordic import CordicEngine, EngineParams, Mode
from hypcordic.fxnum import FxFormat
from oracles import cordic_raw

pytestmark = pytest.mark.filterwarnings("ignore::hypcordic.cordic.ProfileWarning")

needs_compiled = pytest.mark.skipif(kernel._ckernel is None, reason="compiled kernel not built")

PROFILES = [(24, 8, 5, 40), (48, 28, 5, 40), (64, 32, 3, 20), (76, 32, 5, 40),
            (128, 64, 10, 70), (8, 4, 0, 4), (2, 0, 1, 3)]


def _random_batch(fmt, n, seed):
    rnd = random.Random(seed)
    return [[rnd.randint(fmt.raw_min, fmt.raw_max) for _ in range(n)] for _ in range(3)]


@pytest.mark.parametrize("b, fw, m, n", PROFILES)
@pytest.mark.parametrize("mode", list(Mode))
def test_python_kernel_matches_recurrence(b, fw, m, n, mode):
    fmt = FxFormat(b, fw)
    eng = CordicEngine(EngineParams(fmt, m, n))
    xs, ys, zs = _random_batch(fmt, 40, seed=b * 7 + n)
    # keep some in-range, well-behaved samples alongside the random ones
    xs += [eng.inv_scale_raw, 2 << fw if b - fw > 3 else 1]
    ys += [eng.inv_scale_raw, 0]
    zs += [0, 0]
    got = eng.run_raw(mode, xs, ys, zs, backend=kernel.run_batch_python)
    vec = mode is Mode.VECTORING
    for j in range(len(xs)):
        want = cordic_raw(xs[j], ys[j], zs[j], vec, b, fw, m, n)
        assert (got[0][j], got[1][j], got[2][j]) == want


@needs_compiled
@pytest.mark.parametrize("b, fw, m, n", PROFILES)
@pytest.mark.parametrize("mode", list(Mode))
def test_backends_bit_identical(b, fw, m, n, mode):
    fmt = FxFormat(b, fw)
    eng = CordicEngine(EngineParams(fmt, m, n))
    xs, ys, zs = _random_batch(fmt, 500, seed=b + m)
    edge = [fmt.raw_min, fmt.raw_max, 0, -1, 1]
    xs, ys, zs = xs + edge * 5, ys + edge * 5, zs + [e for e in edge for _ in range(5)]
    py = eng.run_raw(mode, xs, ys, zs, backend=kernel.run_batch_python)
    cc = eng.run_raw(mode, xs, ys, zs, backend=kernel.run_batch_compiled)
    assert py == cc


def test_step_matches_batch():
    fmt = FxFormat(52, 32)
    eng = CordicEngine(EngineParams(fmt, 5, 40))
    for mode in Mode:
        xs, ys, zs = _random_batch(fmt, 5, seed=3)
        batch = eng.run_raw(mode, xs, ys, zs, backend=kernel.run_batch_python)
        for j in range(5):
            x, y, z = xs[j], ys[j], zs[j]
            for s, neg, th in zip(eng._shifts, eng._negative, eng._thetas):
                x, y, z = kernel.step(x, y, z, s, neg, th, mode is Mode.VECTORING, 52)
            assert (x, y, z) == (batch[0][j], batch[1][j], batch[2][j])


def test_empty_batch():
    eng = CordicEngine(EngineParams(FxFormat(24, 8), 5, 8))
    assert eng.run_raw(Mode.ROTATION, [], [], []) == ([], [], [])


def test_backend_name():
    assert kernel.BACKEND in ("compiled", "python")


def test_env_forces_python_fallback():
    env = dict(os.environ, HYPCORDIC_KERNEL="python")
    code = "import hypcordic; print(hypcordic.BACKEND)"
    res = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, env=env)
    assert res.stdout.strip() == "python"


def test_benchmark_runs():
    bench_dir = os.path.join(os.path.dirname(__file__), os.pardir, "benchmarks")
    sys.path.insert(0, bench_dir)
    try:
        import bench_kernel
    finally:
        sys.path.remove(bench_dir)
    rows = bench_kernel.bench(points=20, repeat=1)
    assert len(rows) == 2 * len(bench_kernel.FORMATS)
    assert all(r[2] == 20 for r in rows)
