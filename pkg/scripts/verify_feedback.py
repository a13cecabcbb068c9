"""Run the finite-horizon feedback checks on random interior parameter triples."""

import argparse

import numpy as np

from ligand_capacity.channel import ChannelParams
from ligand_capacity.verify import verify_theorem1


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--triples", type=int, default=5)
    ap.add_argument("--n", type=int, default=6)
    ap.add_argument("--grid", type=float, default=0.1)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    failures = 0
    for _ in range(args.triples):
        a = np.sort(rng.uniform(0.01, 0.99, 2))
        params = ChannelParams(float(a[0]), float(a[1]), float(rng.uniform(0.01, 0.99)))
        rep = verify_theorem1(params, args.n, args.grid, args.seed)
        failures += not rep.passed
        opt = ", ".join(f"{k}={v:.6f}" for k, v in rep.optima.items())
        print(f"({params.alpha_L:.3f}, {params.alpha_H:.3f}, {params.beta:.3f}) "
              f"{'PASS' if rep.passed else 'FAIL'}  {opt}")
        for c in rep.checks:
            print(f"    {c.name:24s} {'ok ' if c.passed else 'BAD'} measured={c.measured:.3e} {c.detail}")
    raise SystemExit(2 if failures else 0)


if __name__ == "__main__":
    main()
