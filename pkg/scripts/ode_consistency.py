"""Deviation between the discrete receptor chain and the binding ODE as dt shrinks."""

import argparse

from ligand_capacity.continuous import discretization_consistency, loglog_slope


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k-plus", type=float, default=1.0)
    ap.add_argument("--k-minus", type=float, default=1.0)
    ap.add_argument("--c-l", type=float, default=0.5)
    ap.add_argument("--c-h", type=float, default=2.0)
    ap.add_argument("--dt", default="0.1,0.05,0.025,0.01,0.005,0.001")
    args = ap.parse_args()
    rows = discretization_consistency(args.k_plus, args.k_minus, args.c_l, args.c_h,
                                      [float(v) for v in args.dt.split(",")])
    print(f"{'dt':>8} {'alpha_L':>9} {'alpha_H':>9} {'beta':>7} {'max dev':>10}")
    for r in rows:
        flag = "  boundary" if r.boundary else ""
        print(f"{r.dt:8.4f} {r.params.alpha_L:9.5f} {r.params.alpha_H:9.5f} {r.params.beta:7.4f} "
              f"{r.max_deviation:10.3e}{flag}")
    print(f"log-log slope: {loglog_slope(rows):.4f}")


if __name__ == "__main__":
    main()
