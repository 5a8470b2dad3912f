"""Timing comparison of the numba kernel path against the numpy fallback.

The backend is frozen at import time, so the script reruns itself in a
subprocess per backend with DUALATTACK_BACKEND set, then checks that
both backends produced bit-identical results and prints a table of
best-of-three wall times.

Usage: python3 benchmarks/bench_kernels.py
"""

import argparse
import hashlib
import json
import os
import subprocess
import sys
import time

import numpy as np


def _workloads():
    rng = np.random.default_rng(12345)
    from dualattack import _kernels as K

    basis_n = K.pack_rows(rng.integers(0, 2, (20, 32), dtype=np.uint8))
    basis_p = K.pack_rows(rng.integers(0, 2, (20, 28), dtype=np.uint8))
    wht_in = rng.integers(-3, 4, 1 << 20).astype(np.int64)
    coset_basis = K.pack_rows(rng.integers(0, 2, (18, 60), dtype=np.uint8))
    coset_x = K.pack_rows(rng.integers(0, 2, 60, dtype=np.uint8))[0]
    cols = rng.integers(0, 1 << 48, 56, dtype=np.uint64)
    target = int(cols[3] ^ cols[17] ^ cols[29] ^ cols[44])

    def run_gray():
        hn, hp = K.gray_low_weight(basis_n, basis_p, 5)
        return [hn, hp]

    def run_wht():
        return [K.wht_inplace(wht_in.copy())]

    def run_coset():
        return [K.coset_weight_hist(coset_basis, coset_x, 60)]

    def run_comb():
        return [K.comb_xor_search(cols, target, 4)]

    return [
        ("gray_low_weight[m=20,w=5]", run_gray),
        ("wht_inplace[2^20]", run_wht),
        ("coset_weight_hist[2^18,n=60]", run_coset),
        ("comb_xor_search[C(56,4)]", run_comb),
    ]


def _child():
    from dualattack import BACKEND

    results = {}
    for name, fn in _workloads():
        fn()  # warm-up; compiles the numba path outside the timing loop
        best = float("inf")
        for _ in range(3):
            t0 = time.perf_counter()
            out = fn()
            best = min(best, time.perf_counter() - t0)
        digest = hashlib.sha256()
        for arr in out:
            digest.update(np.ascontiguousarray(arr).tobytes())
        results[name] = {"ms": best * 1000.0, "digest": digest.hexdigest()}
    print(json.dumps({"backend": BACKEND, "results": results}))


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--child", action="store_true",
                        help=argparse.SUPPRESS)
    args = parser.parse_args()
    if args.child:
        _child()
        return
    reports = {}
    for backend in ("numba", "numpy"):
        env = dict(os.environ, DUALATTACK_BACKEND=backend)
        proc = subprocess.run([sys.executable, __file__, "--child"],
                              env=env, capture_output=True, text=True)
        if proc.returncode != 0:
            print(f"{backend} child failed:\n{proc.stderr}", file=sys.stderr)
            sys.exit(1)
        rep = json.loads(proc.stdout)
        assert rep["backend"] == backend, rep
        reports[backend] = rep["results"]
    width = max(len(n) for n in reports["numba"])
    print(f"{'kernel':<{width}}  {'numba ms':>9}  {'numpy ms':>9}  speedup")
    for name in reports["numba"]:
        fast = reports["numba"][name]
        slow = reports["numpy"][name]
        if fast["digest"] != slow["digest"]:
            print(f"{name}: BACKENDS DISAGREE", file=sys.stderr)
            sys.exit(1)
        ratio = slow["ms"] / fast["ms"] if fast["ms"] > 0 else float("inf")
        print(f"{name:<{width}}  {fast['ms']:>9.2f}  {slow['ms']:>9.2f}"
              f"  {ratio:>6.1f}x")
    print("all kernels bit-identical across backends")


if __name__ == "__main__":
    main()
