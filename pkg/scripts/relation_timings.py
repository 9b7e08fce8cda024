"""Run each relation suite on one instance and report status, check counts and wall time.

    python3 scripts/relation_timings.py --d 3 --w 2,0,0,0,2 --q 2 --relations iserre,serre1
"""

import argparse
import time
from collections import defaultdict

from sigmaquiver.verify import RELATIONS, instances_for, lemma_suite, run_instance


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--d", type=int, default=2)
    ap.add_argument("--w", default="2,0,2")
    ap.add_argument("--q", default="2,3")
    ap.add_argument("--relations", default=",".join(RELATIONS))
    ap.add_argument("--lemmas", action="store_true")
    args = ap.parse_args()
    w = tuple(int(x) for x in args.w.split(","))
    qs = tuple(int(x) for x in args.q.split(","))

    per_rel = defaultdict(lambda: [0, 0.0, True])
    for inst in instances_for(args.d, w, args.relations.split(","), qs):
        t0 = time.perf_counter()
        rep = run_instance(inst)
        dt = time.perf_counter() - t0
        acc = per_rel[inst.name]
        acc[0] += rep.checked
        acc[1] += dt
        acc[2] &= rep.passed
        print(f"{inst.label():48s} {rep.status:5s} checked={rep.checked:<8d} {dt:7.1f}s")
        for wit in rep.witnesses[:3]:
            print("   witness:", wit)
    if args.lemmas:
        t0 = time.perf_counter()
        for rep in lemma_suite(args.d, w, qs):
            print(f"{rep.instance.label():48s} {rep.status:5s} checked={rep.checked}")
        per_rel["lemmas"][1] += time.perf_counter() - t0
    print()
    for name, (n, dt, ok) in per_rel.items():
        print(f"{name:10s} {'pass' if ok else 'FAIL':5s} {n:9d} checks {dt:8.1f}s")


if __name__ == "__main__":
    main()
