"""4-motif counting time on RMAT graphs of doubling size.

    python3 scripts/growth.py --scales 14 15 16 --degree 10
"""
import argparse

from gpminer import motif_count
from gpminer.generators import rmat


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--scales", type=int, nargs="+", default=[14, 15, 16])
    ap.add_argument("--degree", type=float, default=10)
    ap.add_argument("--k", type=int, default=4)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    motif_count(rmat(8, args.degree), args.k)  # compile
    print("vertices\tedges\tembeddings\tseconds\tratio")
    prev = None
    for s in args.scales:
        g = rmat(s, args.degree, seed=s)
        r = motif_count(g, args.k, args.threads)
        total = sum(r.pattern_map.values().values())
        ratio = f"{r.elapsed / prev:.2f}" if prev else "-"
        print(f"{g.num_vertices}\t{g.num_undirected_edges}\t{total}\t{r.elapsed:.3f}\t{ratio}")
        prev = r.elapsed


if __name__ == "__main__":
    main()
