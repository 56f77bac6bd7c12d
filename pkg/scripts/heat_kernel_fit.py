"""Fitted Gevrey constants of the heat kernel per derivative order."""

import argparse

from hypogevrey.gevrey import fit_gevrey_constant, heat_kernel_table, parse_box
from hypogevrey.hypo import build_H, gevrey_index
from hypogevrey.symbol import parse_symbol


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--orders", type=int, default=12)
    ap.add_argument("--box", default="1,2;-1,1")
    args = ap.parse_args()
    H = build_H(parse_symbol("i*x1 + x2^2", 2), denom_max=4)
    rep = gevrey_index(H, H.sigma)
    table = heat_kernel_table(parse_box(args.box), args.orders)
    fits = {
        "sharp": fit_gevrey_constant(table, rep.sharp_class.polyhedron, rep.sharp_class.s),
        "paper": fit_gevrey_constant(table, rep.paper_class.polyhedron, rep.paper_class.s),
    }
    print("order  max|D^a u|    C_sharp    C_paper")
    for m in range(args.orders + 1):
        top = max(v for a, v in table.entries.items() if sum(a) == m)
        print(f"{m:<6} {top:<13.4e} {fits['sharp'].per_order_max[m]:<10.4f} {fits['paper'].per_order_max[m]:.4f}")
    for name, fit in fits.items():
        print(f"{name}: global C {fit.C:.4f}, trend slope {fit.trend_slope:+.4f}")


if __name__ == "__main__":
    main()
