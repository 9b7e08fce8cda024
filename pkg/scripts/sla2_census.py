"""Count how Lagrangian triples (L1, L2, L3) with L1, L3 neighbors of L2 split into branches.

    python3 scripts/sla2_census.py --n 2 --q 2,3
"""

import argparse
import time

from sigmaquiver.verify import check_sla2


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=2)
    ap.add_argument("--q", default="2,3")
    args = ap.parse_args()
    for q in (int(x) for x in args.q.split(",")):
        t0 = time.perf_counter()
        total, bad, branches = check_sla2(args.n, q)
        print(f"n={args.n} q={q}: {total} triples, {bad} outside the case split, {time.perf_counter() - t0:.1f}s")
        for k in sorted(branches):
            print(f"   {k:12s} {branches[k]}")


if __name__ == "__main__":
    main()
