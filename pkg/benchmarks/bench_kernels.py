"""Compare the compiled and pure-Python kernels.

Usage: ``python benchmarks/bench_kernels.py [--repeat N]``
"""

import argparse
import timeit

import numpy as np

from softook import _backend, _pykernels, convcode, demod, sim
from softook.core import RngStream

try:
    from softook import _kernels
except ImportError:
    _kernels = None


def _use(mod):
    convcode.kernels = demod.kernels = _backend.kernels = mod


def bench(repeat: int):
    gen = np.random.default_rng(0)
    llrs = gen.normal(0.0, 2.0, convcode.DEFAULT_CODE.coded_length(1000))
    x = gen.uniform(0.0, 700.0, 100_000)
    cfg = sim.SimConfig()
    cases = {
        "viterbi (L=1000)": lambda: convcode.viterbi_decode(llrs),
        "log I0 (1e5 values)": lambda: demod.log_bessel_i0(x),
        "full trial (exact, 3 dB)": lambda: sim.run_trial(cfg, 3.0, RngStream(1, 0)),
    }
    backends = {"python": _pykernels}
    if _kernels is not None:
        backends["cython"] = _kernels
    times = {}
    for name, mod in backends.items():
        _use(mod)
        for case, fn in cases.items():
            fn()
            times[case, name] = min(timeit.repeat(fn, number=1, repeat=repeat))
    _use(_kernels or _pykernels)
    print(f"{'case':28s}" + "".join(f"{b:>12s}" for b in backends) + ("     speedup" if len(backends) > 1 else ""))
    for case in cases:
        row = f"{case:28s}" + "".join(f"{times[case, b] * 1e3:10.3f}ms" for b in backends)
        if len(backends) > 1:
            row += f"{times[case, 'python'] / times[case, 'cython']:11.1f}x"
        print(row)


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    bench(p.parse_args().repeat)
