"""Thread scaling of triangle counting on a sparse random graph.

    python3 scripts/speedup.py --n 50000 --degree 20 --threads 1 2 4 8
"""
import argparse
import os

from gpminer import orient_dag, triangle_count
from gpminer.generators import sparse_random


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--n", type=int, default=50_000)
    ap.add_argument("--degree", type=float, default=20)
    ap.add_argument("--threads", type=int, nargs="+", default=[1, 2, 4, 8])
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    dag = orient_dag(sparse_random(args.n, args.degree, seed=args.seed))
    triangle_count(dag, 1, None)  # compile
    print(f"# cpus={os.cpu_count()} n={args.n} edges={dag.num_edges}")
    print("threads\tseconds\tspeedup\ttriangles")
    base = None
    for t in args.threads:
        best = min(triangle_count(dag, t, None).elapsed for _ in range(args.repeats))
        base = base or best
        print(f"{t}\t{best:.4f}\t{base / best:.2f}\t{triangle_count(dag, t, None).total_count}")


if __name__ == "__main__":
    main()
