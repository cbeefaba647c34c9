"""Compare the numba and pure-numpy kernel backends.

Each backend runs in its own subprocess because the choice is made once at
import time from VMAFLAB_BACKEND.

    python benchmarks/bench_backends.py [--repeat 5] [--size 192x108]
"""

import argparse
import json
import os
import subprocess
import sys
import time

CASES = ("gaussian_blur", "frame_features", "clahe", "unsharp", "nondominated_sort")


def run_cases(repeat: int, width: int, height: int) -> dict:
    import numpy as np

    from vmaflab import _kernels
    from vmaflab.enhance import clahe_plane, unsharp_plane
    from vmaflab.features import frame_features
    from vmaflab.filters import gaussian_blur
    from vmaflab.nsga2 import Individual, fast_nondominated_sort

    rng = np.random.default_rng(0)
    ref = np.round(gaussian_blur(rng.uniform(0, 255, (height, width)), 1.5))
    dist = np.clip(ref + rng.normal(0, 4, ref.shape), 0, 255)
    pop = [Individual(genes=np.zeros(2), objectives=tuple(o)) for o in rng.normal(size=(200, 2))]
    fns = {
        "gaussian_blur": lambda: gaussian_blur(ref, 2.0),
        "frame_features": lambda: frame_features(ref, dist, ref),
        "clahe": lambda: clahe_plane(ref.astype(np.int64), 8, 0.01, 255),
        "unsharp": lambda: unsharp_plane(ref, 5.0, 0.5),
        "nondominated_sort": lambda: fast_nondominated_sort(pop),
    }
    out = {"backend": _kernels.BACKEND}
    for name in CASES:
        fns[name]()  # warm-up (numba compiles or loads its cache here)
        times = []
        for _ in range(repeat):
            t = time.perf_counter()
            fns[name]()
            times.append(time.perf_counter() - t)
        out[name] = min(times)
    return out


def main():
    ap = argparse.ArgumentParser(description="numba vs numpy kernel timings")
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--size", default="192x108", help="frame WxH")
    ap.add_argument("--worker", choices=("numba", "numpy"), help=argparse.SUPPRESS)
    args = ap.parse_args()
    w, h = (int(v) for v in args.size.lower().split("x"))

    if args.worker:
        print(json.dumps(run_cases(args.repeat, w, h)))
        return

    results = {}
    for backend in ("numba", "numpy"):
        env = dict(os.environ, VMAFLAB_BACKEND=backend)
        proc = subprocess.run([sys.executable, __file__, "--worker", backend, "--repeat", str(args.repeat),
                               "--size", args.size], env=env, capture_output=True, text=True)
        if proc.returncode != 0:
            print(f"{backend} backend failed:\n{proc.stderr}", file=sys.stderr)
            continue
        results[backend] = json.loads(proc.stdout.strip().splitlines()[-1])

    print(f"frame {w}x{h}, best of {args.repeat} (ms)")
    print(f"{'case':<20}{'numba':>10}{'numpy':>10}{'speedup':>10}")
    for name in CASES:
        a = results.get("numba", {}).get(name)
        b = results.get("numpy", {}).get(name)
        cells = [f"{v * 1e3:10.2f}" if v is not None else f"{'-':>10}" for v in (a, b)]
        ratio = f"{b / a:9.2f}x" if a and b else f"{'-':>10}"
        print(f"{name:<20}{cells[0]}{cells[1]}{ratio}")


if __name__ == "__main__":
    main()
