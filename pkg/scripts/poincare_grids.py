"""Surface-of-section fields α(σ, p_σ) and β(σ, p_σ) for the reference cavity.

Thin wrapper around the CLI so that the grids and SVG contours land in one
directory:

    python3 scripts/poincare_grids.py [--out results/poincare]
"""

import argparse
import sys

from paracavity.cli import main as cli_main


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/poincare")
    ap.add_argument("--grid", type=int, default=121)
    args = ap.parse_args()
    return cli_main(["poincare", "--sigma0", "3", "--tau0", "2", "--grid", str(args.grid),
                     "--out", args.out, "--format", "csv", "--format", "svg"])


if __name__ == "__main__":
    sys.exit(main())
