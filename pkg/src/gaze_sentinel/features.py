"""Gaze-metric features over a time slice: shift rates, end-effector dwell,
AOI occupancy shares, and scanpath entropies.

All metrics are computed from a debounced fixation sequence clipped to the
slice. A gaze shift is the boundary between consecutive fixations; an entry
at exactly the slice start counts as a visit, not a shift. Entropies are in
bits and use the empirical visit distribution, which stays well-defined on
short, possibly non-ergodic slices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import AoiLabel, FixationEvent, N_AOI
from .errors import InvalidSliceError

FEATURE_SCHEMA_VERSION = 1
FEATURE_NAMES = (
    "shift_rate_all",
    "shift_rate_robot_body",
    "mean_ee_dwell",
    "p_robot_body",
    "p_end_effector",
    "p_robot_pieces",
    "p_participant_pieces",
    "p_puzzle_board",
    "p_elsewhere",
    "transition_entropy",
    "stationary_entropy",
)
N_FEATURES = len(FEATURE_NAMES)


@dataclass(frozen=True)
class FeatureVector:
    """The 11 gaze metrics for one time slice, in persisted column order."""

    shift_rate_all: float
    shift_rate_robot_body: float
    mean_ee_dwell: float
    p_aoi: tuple  # six occupancy probabilities in AoiLabel order
    transition_entropy: float
    stationary_entropy: float

    def as_array(self) -> np.ndarray:
        return np.array(
            [
                self.shift_rate_all,
                self.shift_rate_robot_body,
                self.mean_ee_dwell,
                *self.p_aoi,
                self.transition_entropy,
                self.stationary_entropy,
            ],
            dtype=np.float64,
        )

    @classmethod
    def from_array(cls, values) -> "FeatureVector":
        v = np.asarray(values, dtype=np.float64)
        if v.shape != (N_FEATURES,):
            raise InvalidSliceError(f"expected {N_FEATURES} components, got {v.shape}")
        return cls(
            shift_rate_all=float(v[0]),
            shift_rate_robot_body=float(v[1]),
            mean_ee_dwell=float(v[2]),
            p_aoi=tuple(float(p) for p in v[3:9]),
            transition_entropy=float(v[9]),
            stationary_entropy=float(v[10]),
        )


@dataclass(frozen=True)
class TransitionModel:
    """Fixation-to-fixation transition counts plus the empirical visit
    distribution over AOIs."""

    counts: np.ndarray  # (6, 6) int64
    visit_dist: np.ndarray  # (6,) float64; all-zero when no fixations exist

    def __post_init__(self):
        counts = np.ascontiguousarray(self.counts, dtype=np.int64)
        pi = np.ascontiguousarray(self.visit_dist, dtype=np.float64)
        counts.flags.writeable = False
        pi.flags.writeable = False
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "visit_dist", pi)


def clip_fixations(fixations, t0: float, t1: float) -> list[FixationEvent]:
    """Truncate fixations at slice edges, dropping zero-overlap events."""
    out = []
    for f in fixations:
        s = max(f.start, t0)
        e = min(f.end, t1)
        if e - s > 1e-12:
            out.append(FixationEvent(f.aoi, s, e - s))
    return out


def _codes(fixations) -> list[int]:
    return [int(f.aoi) if isinstance(f, FixationEvent) else int(f) for f in fixations]


def build_transition_model(fixations) -> TransitionModel:
    """Tally consecutive fixation pairs and visit frequencies.

    Accepts FixationEvents or bare AOI labels. With no fixations, the visit
    distribution is the all-zero flag and downstream entropies are 0.
    """
    codes = _codes(fixations)
    counts = np.zeros((N_AOI, N_AOI), dtype=np.int64)
    for a, b in zip(codes, codes[1:]):
        counts[a, b] += 1
    pi = np.zeros(N_AOI, dtype=np.float64)
    if codes:
        pi = np.bincount(codes, minlength=N_AOI).astype(np.float64) / len(codes)
    return TransitionModel(counts, pi)


def stationary_entropy(visit_dist) -> float:
    """Shannon entropy of the visit distribution, in bits (0*log0 := 0)."""
    p = np.asarray(visit_dist, dtype=np.float64)
    p = p[p > 0]
    if p.size == 0:
        return 0.0
    return float(-(p * np.log2(p)).sum())


def transition_entropy(model: TransitionModel) -> float:
    """Visit-weighted expected entropy of per-AOI transition rows, in bits.

    Rows with zero outgoing transitions contribute nothing.
    """
    counts = model.counts.astype(np.float64)
    row_sums = counts.sum(axis=1)
    total = 0.0
    for i in range(N_AOI):
        if row_sums[i] <= 0 or model.visit_dist[i] <= 0:
            continue
        p = counts[i] / row_sums[i]
        p = p[p > 0]
        total += model.visit_dist[i] * float(-(p * np.log2(p)).sum())
    return total


def extract_features(fixations, t0: float, t1: float, *, clipped: bool = False) -> FeatureVector:
    """Compute the feature vector for the slice [t0, t1].

    ``fixations`` may be an unclipped session sequence (default) or a
    pre-clipped one (``clipped=True``). Elsewhere occupancy absorbs off-AOI
    and invalid time so the six probabilities always sum to 1.
    """
    if not t1 > t0:
        raise InvalidSliceError(f"slice [{t0}, {t1}] is empty")
    fx = list(fixations) if clipped else clip_fixations(fixations, t0, t1)
    span = t1 - t0

    n = len(fx)
    shift_rate_all = (n - 1) / span if n > 1 else 0.0
    rb_entries = sum(
        1 for f in fx if f.aoi is AoiLabel.ROBOT_BODY and f.start > t0
    )
    shift_rate_rb = rb_entries / span

    ee_durations = [f.duration for f in fx if f.aoi is AoiLabel.END_EFFECTOR]
    mean_ee = sum(ee_durations) / len(ee_durations) if ee_durations else 0.0

    dwell = np.zeros(N_AOI, dtype=np.float64)
    for f in fx:
        dwell[int(f.aoi)] += f.duration
    p = dwell / span
    p[int(AoiLabel.ELSEWHERE)] = max(
        0.0, 1.0 - float(np.sum(np.delete(p, int(AoiLabel.ELSEWHERE))))
    )

    model = build_transition_model(fx)
    return FeatureVector(
        shift_rate_all=float(shift_rate_all),
        shift_rate_robot_body=float(shift_rate_rb),
        mean_ee_dwell=float(mean_ee),
        p_aoi=tuple(float(v) for v in p),
        transition_entropy=transition_entropy(model),
        stationary_entropy=stationary_entropy(model.visit_dist),
    )
