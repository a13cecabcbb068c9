"""Capacity along (eps, 1 - eps, 1 - eps) and, for contrast, (eps, 1 - eps, eps)."""

import argparse

from ligand_capacity.iid import GOLDEN_ARGMAX, GOLDEN_CAPACITY, golden_limit_study


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--eps", default="1e-1,1e-2,1e-3,1e-4,1e-5,1e-6")
    args = ap.parse_args()
    schedule = [float(v) for v in args.eps.split(",")]
    print(f"target: {GOLDEN_CAPACITY:.6f} bits at p_H = {GOLDEN_ARGMAX:.6f}")
    print(f"{'eps':>8} {'C (beta=1-eps)':>15} {'argmax':>9} {'gap':>10} {'C (beta=eps)':>13}")
    up = golden_limit_study(schedule)
    down = golden_limit_study(schedule, beta_follows="eps")
    for a, b in zip(up, down):
        print(f"{a.epsilon:8.0e} {a.capacity:15.6f} {a.argmax_p_H:9.6f} "
              f"{GOLDEN_CAPACITY - a.capacity:10.2e} {b.capacity:13.2e}")


if __name__ == "__main__":
    main()
