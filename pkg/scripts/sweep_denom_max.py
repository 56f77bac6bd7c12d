"""How H, σ and the paper_class index react to the exponent grid."""

import argparse
import time

from hypogevrey.hypo import GridExhausted, build_H, gevrey_index
from hypogevrey.sampling import SamplingConfig
from hypogevrey.symbol import parse_symbol


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("symbol", nargs="?", default="i*x1 + x2^2")
    ap.add_argument("--dim", type=int, default=2)
    ap.add_argument("--max", type=int, default=12)
    args = ap.parse_args()
    P = parse_symbol(args.symbol, args.dim)
    cfg = SamplingConfig()
    print("D   accepted  sigma  paper_s  time_s  vertices")
    for D in range(1, args.max + 1):
        t0 = time.perf_counter()
        try:
            H = build_H(P, cfg, denom_max=D)
        except GridExhausted:
            print(f"{D:<3} grid exhausted")
            continue
        rep = gevrey_index(H, H.sigma)
        verts = " ".join("(" + ",".join(str(x) for x in v) + ")" for v in H.vertices)
        print(f"{D:<3} {len(H.accepted):<9} {H.sigma:<6} {str(rep.paper_class.s):<8} {time.perf_counter() - t0:<7.2f} {verts}")


if __name__ == "__main__":
    main()
