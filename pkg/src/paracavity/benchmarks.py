"""Reference low-lying spectrum of the (σ₀, τ₀) = (3, 2) cavity and a matcher.

Rows are (k², label, α, β, Π) rounded to two decimals.  The printed labels
do not always agree with node counting, so comparisons go through
:func:`match_rows`, which pairs rows by value and ignores labels.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

__all__ = ["REFERENCE_CAVITY", "REFERENCE_ROWS", "RowMatch", "match_rows"]

REFERENCE_CAVITY = (3.0, 2.0)

# k2, label (l, n, m), alpha, beta, Pi
REFERENCE_ROWS = (
    (0.59, (0, 0, 0), -1.17, 0.00, 0.06),
    (1.04, (0, 0, 1), -2.18, 0.96, 0.13),
    (1.48, (1, 0, 0), 0.04, 0.00, 0.01),
    (1.56, (0, 0, 2), -3.15, 2.56, 0.20),
    (1.71, (0, 2, 0), -4.28, 0.00, 0.25),
    (2.13, (1, 0, 1), -0.37, 0.47, 0.10),
    (2.16, (0, 0, 3), -4.09, 4.16, 0.31),
    (2.44, (0, 2, 1), -5.85, 0.41, 0.56),
    (2.78, (2, 0, 0), 1.02, 0.00, 0.27),
    (2.84, (0, 0, 4), -5.01, 5.64, 0.49),
    (2.87, (1, 0, 2), -0.91, 1.39, 0.13),
    (3.10, (1, 2, 0), -2.34, 0.00, 0.26),
    (3.25, (0, 1, 2), -7.24, 1.23, 0.88),
    (3.38, (0, 1, 0), -7.90, 0.00, 0.96),
    (3.59, (0, 0, 5), -5.93, 6.97, 0.73),
    (3.61, (2, 0, 1), 1.03, 0.28, 0.22),
    (3.69, (1, 0, 3), -1.51, 2.44, 0.17),
    (4.09, (1, 2, 1), -3.52, 0.24, 0.45),
)

TOLERANCES = {"k2": 0.01, "alpha": 0.02, "beta": 0.02, "Pi": 0.02}


@dataclass(frozen=True)
class RowMatch:
    reference: tuple
    computed: tuple
    errors: dict

    @property
    def ok(self):
        return all(self.errors[k] <= TOLERANCES[k] + 1e-12 for k in TOLERANCES)

    @property
    def label_agrees(self):
        return tuple(self.reference[1]) == tuple(self.computed[1])


def match_rows(computed, reference=REFERENCE_ROWS):
    """Optimal one-to-one pairing of computed rows with reference rows.

    ``computed`` holds (k², (l, n, m), α, β, Π) tuples.  The cost of a pair
    is its largest tolerance-scaled error, so a perfect assignment has every
    cost ≤ 1.  Returns (matches, unmatched_reference, unmatched_computed).
    """
    keys = ("k2", "alpha", "beta", "Pi")
    idx = (0, 2, 3, 4)
    ref = np.array([[r[i] for i in idx] for r in reference], dtype=float)
    cmp_ = np.array([[r[i] for i in idx] for r in computed], dtype=float).reshape(-1, 4)
    scale = np.array([TOLERANCES[k] for k in keys])
    err = np.abs(ref[:, None, :] - cmp_[None, :, :])
    cost = np.max(err / scale, axis=2)
    ri, ci = linear_sum_assignment(cost)
    matches = [
        RowMatch(reference[i], computed[j], {k: float(err[i, j, q]) for q, k in enumerate(keys)})
        for i, j in zip(ri, ci)
    ]
    left_ref = [reference[i] for i in range(len(reference)) if i not in set(ri)]
    left_cmp = [computed[j] for j in range(len(computed)) if j not in set(ci)]
    return matches, left_ref, left_cmp
