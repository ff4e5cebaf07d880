"""Every periodic orbit (s, t, ℓ) with s + t ≤ N in a cavity, with checks.

    python3 scripts/orbit_catalogue.py [--sigma0 3 --tau0 2 --max-sum 7]
"""

import argparse
from pathlib import Path

from paracavity import Cavity
from paracavity.errors import NoSolution
from paracavity.orbits import build_orbit, enumerate_specs, solve_orbit_all
from paracavity.results import Column, Table, write_table_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sigma0", type=float, default=3.0)
    ap.add_argument("--tau0", type=float, default=2.0)
    ap.add_argument("--max-sum", type=int, default=7)
    ap.add_argument("--out", default="results")
    args = ap.parse_args()

    cav = Cavity(args.sigma0, args.tau0)
    table = Table([Column("s", "int"), Column("t", "int"), Column("l", "int"), Column("alpha"), Column("beta"),
                   Column("length"), Column("arc_length"), Column("closure"), Column("advance")])
    for spec in enumerate_specs(args.max_sum):
        try:
            roots = solve_orbit_all(cav, spec)
        except NoSolution:
            continue
        for mc in roots:
            orb = build_orbit(cav, spec, mc)
            table.add(spec.s, spec.t, spec.l, mc.alpha, mc.beta, orb.length, orb.arc_length,
                      orb.closure_error, orb.azimuthal_advance)
            print(f"{str(spec):>10}  alpha={mc.alpha:+.6f}  beta={mc.beta:.6f}  L={orb.length:.6f}"
                  f"  closure={orb.closure_error:.1e}")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_table_csv(table, out / "orbit_catalogue.csv", f"periodic orbits, cavity ({args.sigma0:g},{args.tau0:g})")


if __name__ == "__main__":
    main()
