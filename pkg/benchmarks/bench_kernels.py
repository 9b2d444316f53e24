"""Time the hot kernels with numba and with the pure-numpy fallback.

Each backend runs in its own interpreter because the flag is read at import.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import json
import os
import subprocess
import sys

_WORKER = r"""
import json, sys, time
import numpy as np
from qbouncer._accel import USE_NUMBA
from qbouncer.airy import airy_eval
from qbouncer.classical import simulate
from qbouncer.model import NEUTRON, derive_scales
from qbouncer.oracle import GridSpec, fd_eigenvalues, linear_potential

repeat = int(sys.argv[1])
s = derive_scales(NEUTRON)
t_grid = np.linspace(-12.0, 8.0, 200_000)
cases = {
    "airy_taylor_200k": lambda: airy_eval(t_grid),
    "sturm_bisection_N8000_k3": lambda: fd_eigenvalues(linear_potential(NEUTRON), GridSpec(12 * s.ell_g, 8000), 3, NEUTRON),
    "dp5_one_cycle": lambda: simulate(NEUTRON, n_cycles=1, tol=1e-9),
}
out = {"numba": USE_NUMBA}
for name, fn in cases.items():
    fn()  # warm up (JIT compile or cache load)
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    out[name] = best
print(json.dumps(out))
"""


def _measure(disable: bool, repeat: int) -> dict:
    env = dict(os.environ)
    env.pop("QBOUNCER_DISABLE_NUMBA", None)
    if disable:
        env["QBOUNCER_DISABLE_NUMBA"] = "1"
    proc = subprocess.run([sys.executable, "-c", _WORKER, str(repeat)], env=env,
                          capture_output=True, text=True, check=True)
    return json.loads(proc.stdout)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    fast = _measure(False, args.repeat)
    slow = _measure(True, args.repeat)
    if not fast["numba"]:
        print("numba is not importable; both columns use the fallback")
    print(f"{'kernel':28s} {'numba [s]':>12s} {'numpy [s]':>12s} {'speedup':>9s}")
    for name in (k for k in fast if k != "numba"):
        print(f"{name:28s} {fast[name]:12.4f} {slow[name]:12.4f} {slow[name] / fast[name]:9.1f}")


if __name__ == "__main__":
    main()
