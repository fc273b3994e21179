"""Time the search-game kernels compiled with numba against the plain-Python fallback.

Each backend runs in its own interpreter because the flag is read at import.
Usage: python3 benchmarks/bench_kernels.py [--repeat 3]
"""
import argparse
import json
import os
import subprocess
import sys
import time

WORKLOADS = {
    "dw lex_tree(1,2)": "dag_width(gen_lex_tree(1, 2))",
    "dw halfgrid(4) powerset": "dag_width(powerset_construct(gen_halfgrid(4)).game.graph)",
    "nmdw random(9)": "nmdw(gen_random_digraph(9, 0.3, 7))",
    "ent double_tree(2)": "entanglement(gen_double_tree(2).graph)",
    "dpw lex_tree(2,1)": "directed_path_width(gen_lex_tree(2, 1))",
}

CHILD = """
import json, sys, time
from iipg.generators import *
from iipg.powerset import powerset_construct
from iipg.search_games import *
out = {}
repeat = int(sys.argv[1])
for name, expr in json.loads(sys.argv[2]).items():
    t = time.perf_counter(); eval(expr); first = time.perf_counter() - t
    best = first
    for _ in range(repeat - 1):
        t = time.perf_counter(); eval(expr); best = min(best, time.perf_counter() - t)
    out[name] = (first, best)
print(json.dumps(out))
"""


def run(disable: bool, repeat: int) -> dict:
    env = dict(os.environ, IIPG_DISABLE_NUMBA="1" if disable else "0")
    res = subprocess.run([sys.executable, "-c", CHILD, str(repeat), json.dumps(WORKLOADS)],
                         env=env, capture_output=True, text=True, check=True)
    return json.loads(res.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    t0 = time.perf_counter()
    jit = run(False, args.repeat)
    py = run(True, args.repeat)
    print(f"{'workload':28s} {'numba first':>12s} {'numba best':>11s} {'python best':>12s} {'speedup':>8s}")
    for name in WORKLOADS:
        (jf, jb), (_, pb) = jit[name], py[name]
        print(f"{name:28s} {jf:12.3f} {jb:11.4f} {pb:12.4f} {pb / max(jb, 1e-9):8.1f}x")
    print(f"total {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
