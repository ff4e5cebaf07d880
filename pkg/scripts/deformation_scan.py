"""Energy levels versus σ₀/τ₀ at fixed τ₀ and the detected level crossings.

    python3 scripts/deformation_scan.py [--tau0 1] [--range 1.0 1.6] [--samples 13]
"""

import argparse
from pathlib import Path

from paracavity import spectrum_vs_deformation
from paracavity.results import Column, Table, svg_polylines, write_table_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--tau0", type=float, default=1.0)
    ap.add_argument("--range", type=float, nargs=2, default=(1.0, 1.6))
    ap.add_argument("--samples", type=int, default=13)
    ap.add_argument("--m-max", type=int, default=3)
    ap.add_argument("--states", type=int, default=4)
    ap.add_argument("--out", default="results")
    args = ap.parse_args()

    scan = spectrum_vs_deformation(args.tau0, args.range, args.samples, args.m_max, args.states)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = Table([Column("ratio"), Column("l", "int"), Column("n", "int"), Column("m", "int"), Column("k2")])
    for r in scan.rows:
        rows.add(*r)
    write_table_csv(rows, out / "deformation_levels.csv", f"levels vs sigma0/tau0 at tau0={args.tau0:g}")
    cr = Table([Column("first", "str"), Column("second", "str"), Column("ratio"), Column("k2")])
    for c in scan.crossings:
        cr.add("%d%d%d" % c.first, "%d%d%d" % c.second, c.ratio, c.energy)
        print(f"crossing {c.first} / {c.second} at ratio {c.ratio:.4f}, k2 = {c.energy:.4f}")
    write_table_csv(cr, out / "deformation_crossings.csv", "level crossings")

    labels = sorted({(l, n, m) for _, l, n, m, _ in scan.rows})
    lines = []
    for lab in labels:
        e = scan.energy(lab)
        ok = e == e
        if ok.sum() > 1:
            lines.append([(r, v) for r, v, g in zip(scan.ratios, e, ok) if g])
    (out / "deformation_levels.svg").write_text(svg_polylines(lines))


if __name__ == "__main__":
    main()
