#!/usr/bin/env python3
"""Compare the compiled propagation kernel against the pure-Python one.

Runs identical propagate_set workloads (all powers of an n-cycle, random
fixings) in two subprocesses: one with CYCFIX_PURE=1, one without.  Using
subprocesses keeps the kernel choice — which is made at import time — clean
per measurement.
"""

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, random, sys, time
import cycfix
from cycfix import imptree
from cycfix.core import FixState, Permutation

sizes = json.loads(sys.argv[1])
repeats = int(sys.argv[2])
rng = random.Random(7)
out = {"kernel": imptree.KERNEL_IMPLEMENTATION, "times": {}}
for n in sizes:
    gamma = Permutation([(i + 1) % n for i in range(n)])
    perms = [p for p in (gamma ** k for k in range(1, n)) ]
    cases = []
    for _ in range(repeats):
        fs = FixState(n)
        for i in rng.sample(range(n), n // 8):
            (fs.fixed0 if rng.random() < 0.5 else fs.fixed1).add(i)
        cases.append(fs)
    t0 = time.perf_counter()
    for fs in cases:
        imptree.propagate_set(perms, fs)
    out["times"][str(n)] = time.perf_counter() - t0
print(json.dumps(out))
"""


def run(pure: bool, sizes, repeats):
    env = dict(os.environ)
    if pure:
        env["CYCFIX_PURE"] = "1"
    else:
        env.pop("CYCFIX_PURE", None)
    res = subprocess.run(
        [sys.executable, "-c", WORKER, json.dumps(sizes), str(repeats)],
        env=env, capture_output=True, text=True, check=True)
    return json.loads(res.stdout)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", default="32,64,128",
                    help="comma-separated n values")
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    pure = run(True, sizes, args.repeats)
    fast = run(False, sizes, args.repeats)
    print("pure kernel:     %s" % pure["kernel"])
    print("compiled kernel: %s" % fast["kernel"])
    if fast["kernel"] == pure["kernel"]:
        print("note: compiled kernel unavailable; comparing pure vs pure")
    print("%8s %12s %12s %8s" % ("n", "pure [s]", "compiled [s]", "speedup"))
    for n in sizes:
        tp = pure["times"][str(n)]
        tf = fast["times"][str(n)]
        print("%8d %12.4f %12.4f %7.2fx" % (n, tp, tf, tp / tf if tf else 0))
    return 0


if __name__ == "__main__":
    sys.exit(main())
