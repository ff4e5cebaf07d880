"""Long simulations at random admissible constants: drift and caustic checks.

    python3 scripts/conservation_audit.py [--runs 20 --bounces 10000 --seed 0]
"""

import argparse
import time

import numpy as np

from paracavity import Cavity, MotionConstants, Triangle, caustics, simulate, starting_state


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sigma0", type=float, default=3.0)
    ap.add_argument("--tau0", type=float, default=2.0)
    ap.add_argument("--runs", type=int, default=20)
    ap.add_argument("--bounces", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    cav = Cavity(args.sigma0, args.tau0)
    tri = Triangle(cav.sigma0, cav.tau0)
    rng = np.random.default_rng(args.seed)
    for i in range(args.runs):
        a, b = tri.interior_point(*rng.uniform(0, 1, 2), margin=1e-3)
        t0 = time.time()
        traj = simulate(cav, starting_state(cav, MotionConstants(1.0, a, b)), args.bounces)
        cp = caustics(a, b)
        d = traj.drift()
        viol = max(0.0, cp.sigma_c - min(traj.seg_min_sigma), cp.tau_c - min(traj.seg_min_tau))
        print(f"{i:2d}  alpha={a:+.4f} beta={b:.4f}  drift P={d['P']:.1e} alpha={d['alpha']:.1e} "
              f"beta={d['beta']:.1e}  caustic violation={viol:.1e}  {time.time() - t0:.1f} s")


if __name__ == "__main__":
    main()
