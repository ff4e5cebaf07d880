"""Low-lying spectrum of the (3, 2) cavity against the reference table.

    python3 scripts/reproduce_table.py [--out results/]
"""

import argparse
import time
from pathlib import Path

import numpy as np

from paracavity import Cavity, find_spectrum, normalize, penetration_ratio
from paracavity.benchmarks import REFERENCE_CAVITY, match_rows
from paracavity.results import Column, Table, write_table_csv


def compute_rows(k2_max=4.12, m_max=5):
    cav = Cavity(*REFERENCE_CAVITY)
    pairs = find_spectrum(cav, np.sqrt(k2_max), range(m_max + 1))
    return [(p.energy, (p.l, p.n, p.m), p.alpha, p.beta, penetration_ratio(normalize(p, cav))) for p in pairs]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results")
    args = ap.parse_args()
    t0 = time.time()
    rows = compute_rows()
    matches, miss_ref, extra = match_rows(rows)
    table = Table([Column("k2_ref"), Column("k2"), Column("label_ref", "str"), Column("label", "str"),
                   Column("alpha_ref"), Column("alpha"), Column("beta_ref", unit="L^2"), Column("beta", unit="L^2"),
                   Column("Pi_ref"), Column("Pi"), Column("ok", "int")])
    print(f"{'k2':>6} {'ref':>6}  {'label':>9} {'ref':>9}  {'alpha':>7} {'ref':>6}  {'beta':>6} {'ref':>5}  {'Pi':>5} {'ref':>5}")
    for mt in sorted(matches, key=lambda m: m.reference[0]):
        r, c = mt.reference, mt.computed
        lab = "%d%d%d" % c[1]
        lab_r = "%d%d%d" % r[1]
        flag = "" if mt.label_agrees else "  (label differs)"
        print(f"{c[0]:6.3f} {r[0]:6.2f}  {lab:>9} {lab_r:>9}  {c[2]:7.3f} {r[2]:6.2f}  {c[3]:6.3f} {r[3]:5.2f}  {c[4]:5.3f} {r[4]:5.2f}"
              f"  {'ok' if mt.ok else 'MISMATCH'}{flag}")
        table.add(r[0], c[0], lab_r, lab, r[2], c[2], r[3], c[3], r[4], c[4], int(mt.ok))
    for c in extra:
        print(f"extra computed level: k2 = {c[0]:.3f}, label {c[1]}")
    for r in miss_ref:
        print(f"reference row without partner: {r}")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_table_csv(table, out / "table_reproduction.csv", "spectrum of the (3,2) cavity vs reference")
    n_ok = sum(m.ok for m in matches)
    print(f"{n_ok}/{len(matches)} rows within tolerance, {time.time() - t0:.1f} s")


if __name__ == "__main__":
    main()
