"""Time the numba kernels against their numpy fallbacks and a full joint run.

    python benchmarks/bench_kernels.py [--sizes 16 64 150] [--repeat 5]

The end-to-end row runs ``run_joint`` in two subprocesses, one with
BDIRS_DISABLE_JIT=1, so each backend is picked up at import time as in
normal use.
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from bdirs import kernels
from bdirs.quantizer import XI_SET, QuantSpec


def _best(fn, repeat, number):
    return min(timeit.repeat(fn, repeat=repeat, number=number)) / number


def bench_gradient(n, repeat):
    rng = np.random.default_rng(n)
    w = rng.normal(size=n) + 1j * rng.normal(size=n)
    v = XI_SET[rng.integers(0, 4, n)] + 0.05 * rng.normal(size=n)
    rows = [("numpy", _best(lambda: kernels.precoder_gradient_numpy(w, v, 2.0, 1e-4), repeat, 200))]
    if kernels.precoder_gradient_numba is not None:
        kernels.precoder_gradient_numba(w, v, 2.0, 1e-4)  # compile
        rows.append(("numba", _best(lambda: kernels.precoder_gradient_numba(w, v, 2.0, 1e-4),
                                    repeat, 200)))
    return rows


def bench_greedy(m, repeat):
    rng = np.random.default_rng(m)
    zeta = QuantSpec(1).zeta
    coef = rng.normal(size=m * m) + 1j * rng.normal(size=m * m)
    start = zeta[rng.integers(0, zeta.shape[0], m * m)]
    number = 3 if m > 64 else 20
    rows = [("numpy", _best(lambda: kernels.greedy_sweep_numpy(start.copy(), coef, zeta, 50),
                            repeat, number))]
    if kernels.greedy_sweep_numba is not None:
        kernels.greedy_sweep_numba(start.copy(), coef, zeta, 50)
        rows.append(("numba", _best(lambda: kernels.greedy_sweep_numba(start.copy(), coef, zeta, 50),
                                    repeat, number)))
    return rows


_E2E = """
import time
from bdirs.channel import ChannelParams, make_channels, sample_geometry
from bdirs.objective import LinkObjective, noise_power
from bdirs.optimizer import OptimizerConfig, run_joint
prm = sample_geometry(0, None, ChannelParams(n_bs={n}, m_irs={n}))
obj = LinkObjective(make_channels(prm), noise_power(-174.0, 1e6))
run_joint(obj, OptimizerConfig(), "bd", 0)
t0 = time.perf_counter()
for s in range(3):
    run_joint(obj, OptimizerConfig(), "bd", s)
print((time.perf_counter() - t0) / 3)
"""


def bench_end_to_end(n):
    rows = []
    for label, flag in (("numpy", "1"), ("numba", "0")):
        if flag == "0" and not kernels.HAVE_NUMBA:
            continue
        env = dict(os.environ, BDIRS_DISABLE_JIT=flag)
        out = subprocess.run([sys.executable, "-c", _E2E.format(n=n)], env=env,
                             capture_output=True, text=True, check=True)
        rows.append((label, float(out.stdout.strip())))
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[16, 64, 150])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--skip-e2e", action="store_true")
    args = ap.parse_args(argv)

    print(f"backend in this process: {kernels.backend()}")
    print(f"{'kernel':<22}{'size':>6}{'backend':>9}{'time [ms]':>12}{'speedup':>9}")
    for size in args.sizes:
        suites = [("precoder_gradient", bench_gradient(size, args.repeat)),
                  ("greedy_sweep M^2", bench_greedy(size, args.repeat))]
        if not args.skip_e2e and size <= 64:
            suites.append(("run_joint bd", bench_end_to_end(size)))
        for name, rows in suites:
            ref = rows[0][1]
            for label, t in rows:
                print(f"{name:<22}{size:>6}{label:>9}{1e3 * t:>12.3f}{ref / t:>9.1f}")


if __name__ == "__main__":
    main()
