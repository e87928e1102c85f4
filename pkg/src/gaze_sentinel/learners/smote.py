"""Synthetic minority oversampling by k-nearest-neighbour interpolation.

Each synthetic row is x + u * (x_nn - x) with u ~ Uniform(0, 1) and x_nn one
of x's k nearest same-class neighbours under Euclidean distance on raw
features. Originals are retained unchanged and the majority count never
moves; distance ties break toward the lower row index.
"""

from __future__ import annotations

import numpy as np

from ..errors import InsufficientMinorityError
from .data import LabeledDataset


def smote(dataset: LabeledDataset, k: int = 2, rng=None) -> LabeledDataset:
    """Upsample the minority class to the majority count.

    Balanced input is returned as-is. Meant for training folds only — never
    feed held-out rows through this.
    """
    rng = np.random.default_rng(rng)
    n0, n1 = dataset.class_counts()
    if n0 == n1:
        return dataset
    minority = 1 if n1 < n0 else 0
    n_min, n_maj = min(n0, n1), max(n0, n1)
    if n_min <= k:
        raise InsufficientMinorityError(
            f"minority class has {n_min} rows; need more than k={k}"
        )

    rows = np.flatnonzero(dataset.y == minority)
    Xm = dataset.X[rows]
    diff = Xm[:, None, :] - Xm[None, :, :]
    d2 = np.einsum("ijk,ijk->ij", diff, diff)
    np.fill_diagonal(d2, np.inf)
    # Stable argsort keeps lower row indices first on exact distance ties.
    nn = np.argsort(d2, axis=1, kind="stable")[:, :k]

    n_new = n_maj - n_min
    base = rng.integers(0, n_min, size=n_new)
    pick = rng.integers(0, k, size=n_new)
    u = rng.random(n_new)
    neighbours = Xm[nn[base, pick]]
    synth = Xm[base] + u[:, None] * (neighbours - Xm[base])

    return LabeledDataset(
        X=np.vstack([dataset.X, synth]),
        y=np.concatenate([dataset.y, np.full(n_new, minority, dtype=np.int64)]),
        groups=np.concatenate([dataset.groups, dataset.groups[rows][base]]),
    )
