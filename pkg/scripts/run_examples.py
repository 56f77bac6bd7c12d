"""Classify the reference symbols and build H where possible."""

import argparse
import time

from hypogevrey.classify import hypoellipticity_test, mq_test
from hypogevrey.hypo import HypoPolyhedronError, build_H, gevrey_index
from hypogevrey.polyhedron import symbol_polyhedron
from hypogevrey.symbol import parse_symbol

EXAMPLES = {
    "wave": "x1^2 - x2^2",
    "laplace": "x1^2 + x2^2",
    "heat": "i*x1 + x2^2",
    "heat3": "i*x1 + x2^2 + x3^2",
    "non-mq": (
        "i*x1^5 + i*x1*x2^4 - 4*i*x1^4*x2 - 4*i*x1^2*x2^3 + 6*i*x1^3*x2^2 + i*x1^3 + i*x1*x2^2"
        " + x1^4*x2^2 + x2^6 - 4*x1^3*x2^3 - 4*x1*x2^5 + 6*x1^2*x2^4 + x2^2*x1^2 + x2^4"
    ),
}


def fmt(vs):
    return "{" + ", ".join("(" + ", ".join(str(x) for x in v) + ")" for v in vs) + "}"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--denom-max", type=int, default=6)
    args = ap.parse_args()
    for name, text in EXAMPLES.items():
        t0 = time.perf_counter()
        n = 3 if name == "heat3" else 2
        P = parse_symbol(text, n)
        gamma = symbol_polyhedron(P)
        mq = mq_test(P)
        hyp = hypoellipticity_test(P)
        print(f"== {name}: {text if len(text) < 40 else text[:37] + '...'}")
        print(f"   Γ(P) {fmt(gamma.vertices)}  regular={gamma.regular}")
        print(f"   MQ {mq.kind}  hypoelliptic {hyp.kind}  ({hyp.reason})")
        try:
            H = build_H(P, denom_max=args.denom_max, verdict=hyp)
        except HypoPolyhedronError as exc:
            print(f"   H: {type(exc).__name__}: {exc}")
        else:
            rep = gevrey_index(H, H.sigma)
            print(f"   H {fmt(H.vertices)}  σ={H.sigma}  paper s={rep.paper_class.s}  sharp s={rep.sharp_class.s}")
        print(f"   {time.perf_counter() - t0:.2f} s")


if __name__ == "__main__":
    main()
