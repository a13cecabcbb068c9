"""Best two-state Markov input on the fast-unbinding discretisation versus Kabanov's capacity."""

import argparse

from ligand_capacity.poisson import kabanov_convergence


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--c", type=float, default=1.0)
    ap.add_argument("--dt", default="0.2,0.1,0.05,0.025,0.0125")
    ap.add_argument("--n", type=int, default=12)
    ap.add_argument("--grid", type=int, default=50)
    args = ap.parse_args()
    rows = kabanov_convergence(args.c, [float(v) for v in args.dt.split(",")], args.n, args.grid)
    print(f"Kabanov capacity at c={args.c}: {rows[0].kabanov_nats_per_time:.8f} nats/time")
    print(f"{'dt':>8} {'r':>6} {'s':>6} {'lower':>11} {'upper':>11} {'|gap|':>10}")
    for r in rows:
        print(f"{r.dt:8.4f} {r.best_r:6.2f} {r.best_s:6.2f} {r.lower_nats_per_time:11.7f} "
              f"{r.upper_nats_per_time:11.7f} {r.abs_gap:10.2e}")


if __name__ == "__main__":
    main()
