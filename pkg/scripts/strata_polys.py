"""Tabulate stratum point counts over several fields and fit a polynomial per stratum.

    python3 scripts/strata_polys.py --d 2 --w 2,0,2 --q 2,3,4,5,7
"""

import argparse

from sigmaquiver.chi import chi_of_counter, euler
from sigmaquiver.grassmann import dimension_vectors, enumerate_L, enumerate_R
from sigmaquiver.verify import cached_instance


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--d", type=int, default=2)
    ap.add_argument("--w", default="2,0,2")
    ap.add_argument("--q", default="2,3,4,5,7")
    ap.add_argument("--nakajima", action="store_true", help="plain quiver Grassmannian instead of the fixed locus")
    args = ap.parse_args()
    w = tuple(int(x) for x in args.w.split(","))
    qs = [int(x) for x in args.q.split(",")]
    sigma = not args.nakajima
    inst = cached_instance(args.d, w, sigma)

    def count(v, q):
        rep, form = inst.over(q)
        return (enumerate_R(rep, form, v) if sigma else enumerate_L(rep, v)).count

    rep0, _ = inst.over(qs[0])
    total_chi = 0
    print("v".ljust(16), " ".join(f"q={q}".rjust(8) for q in qs), "  poly  chi")
    for v in dimension_vectors(rep0, "R" if sigma else "L"):
        counts = [count(v, q) for q in qs]
        if not any(counts):
            continue
        # leave one sample as a check on the fit
        poly = chi_of_counter(lambda q, v=v: counts[qs.index(q)], qs, len(qs) - 2)
        total_chi += euler(poly)
        print(str(v).ljust(16), " ".join(str(c).rjust(8) for c in counts), " ", poly.pretty(), euler(poly))
    print("total chi", total_chi)


if __name__ == "__main__":
    main()
