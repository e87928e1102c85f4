"""Evaluation harness: participant-level leave-one-out cross-validation,
truncated-prefix evaluation, sliding-window real-time detection, and the
per-interval detection-percentage analysis.

Oversampling happens strictly inside training folds; held-out rows never
touch training. Aggregate metrics pool predictions across folds rather than
averaging fold metrics, since per-fold test sets are tiny.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import (
    DEFAULT_MIN_DWELL_S,
    Debouncer,
    EpisodeSegment,
    FAILURE_DURATIONS,
    Session,
    segment_session,
)
from .errors import InvalidParameterError
from .features import FEATURE_NAMES, extract_features
from .learners import (
    ClassifierConfig,
    LabeledDataset,
    TrainedModel,
    predict_batch,
    smote,
    train,
)

TASKS = {"nf-ef": "EF", "nf-df": "DF"}


def metrics(y_true, y_pred) -> tuple[float, Optional[float]]:
    """(accuracy, recall-of-failure); recall is None without failure rows."""
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    if y_true.size == 0 or y_true.shape != y_pred.shape:
        raise InvalidParameterError("metrics need equal-length, non-empty inputs")
    accuracy = float(np.mean(y_true == y_pred))
    pos = y_true == 1
    recall = float(np.mean(y_pred[pos] == 1)) if pos.any() else None
    return accuracy, recall


@dataclass(frozen=True)
class FoldResult:
    participant: int
    n_test: int
    accuracy: float
    recall: Optional[float]


@dataclass(frozen=True)
class EvalReport:
    """Pooled and per-fold accuracy/recall for one task and regime."""

    task: str
    regime: str
    folds: tuple
    accuracy: float
    recall: Optional[float]


@dataclass(eq=False)
class SegmentRow:
    """One classification unit: a labelled segment plus its features."""

    participant: int
    puzzle: int
    piece: int
    label: str
    t0: float
    t1: float
    features: np.ndarray
    session: Optional[Session] = None


class Corpus:
    """Session collection with cached debouncing, segment features, and
    per-window features (shared across classifiers and folds)."""

    def __init__(self, sessions, min_dwell: float = DEFAULT_MIN_DWELL_S):
        self.sessions = sorted(sessions, key=lambda s: (s.participant_id, s.puzzle_id))
        self.min_dwell = min_dwell
        self._debouncers: dict = {}
        self._fixations: dict = {}
        self._segment_rows: Optional[list] = None
        self._window_cache: dict = {}

    def _key(self, session: Session):
        return (session.participant_id, session.puzzle_id)

    def debouncer(self, session: Session) -> Debouncer:
        key = self._key(session)
        if key not in self._debouncers:
            self._debouncers[key] = Debouncer(session.gaze, session.layout, self.min_dwell)
        return self._debouncers[key]

    def fixations(self, session: Session):
        key = self._key(session)
        if key not in self._fixations:
            self._fixations[key] = self.debouncer(session).fixations()
        return self._fixations[key]

    def segment_rows(self) -> list:
        if self._segment_rows is None:
            rows = []
            for session in self.sessions:
                fixations = self.fixations(session)
                for seg in segment_session(session):
                    fv = extract_features(fixations, seg.t_start, seg.t_end)
                    rows.append(
                        SegmentRow(
                            participant=seg.participant_id,
                            puzzle=seg.puzzle_id,
                            piece=seg.piece_index,
                            label=seg.label,
                            t0=seg.t_start,
                            t1=seg.t_end,
                            features=fv.as_array(),
                            session=session,
                        )
                    )
            self._segment_rows = rows
        return self._segment_rows

    def rows_for_task(self, task: str) -> list:
        ftype = _failure_type(task)
        return [r for r in self.segment_rows() if r.label in ("NF", ftype)]

    def dataset_for_task(self, task: str) -> tuple[LabeledDataset, list]:
        rows = self.rows_for_task(task)
        X = np.array([r.features for r in rows])
        y = np.array([0 if r.label == "NF" else 1 for r in rows], dtype=np.int64)
        groups = np.array([r.participant for r in rows], dtype=np.int64)
        return LabeledDataset(X, y, groups), rows

    @property
    def participants(self) -> list:
        return sorted({s.participant_id for s in self.sessions})

    def failure_sessions(self, failure_type: str) -> list:
        return [s for s in self.sessions if s.timeline.failure_type == failure_type]

    def window_features(self, session: Session, width: float, slide: float = 1.0):
        """(windows, feature matrix) computed causally and cached."""
        key = (self._key(session), float(width), float(slide))
        if key not in self._window_cache:
            windows = sliding_windows(session, width, slide)
            deb = self.debouncer(session)
            rows = np.empty((len(windows), len(FEATURE_NAMES)))
            for i, w in enumerate(windows):
                fx = deb.fixations_until(w.t1)
                rows[i] = extract_features(fx, w.t0, w.t1).as_array()
            self._window_cache[key] = (windows, rows)
        return self._window_cache[key]


def _failure_type(task: str) -> str:
    if task not in TASKS:
        raise InvalidParameterError(f"unknown task {task!r}")
    return TASKS[task]


def fit_fold(dataset: LabeledDataset, config: ClassifierConfig, held_out: int,
             smote_k: int = 2) -> TrainedModel:
    """Train on every participant except ``held_out``; SMOTE applies to the
    training split only, seeded by (config seed, held-out participant)."""
    train_split = dataset.subset(dataset.groups != held_out)
    rng = np.random.default_rng(
        np.random.SeedSequence(config.seed, spawn_key=(int(held_out),))
    )
    balanced = smote(train_split, k=smote_k, rng=rng)
    return train(config, balanced)


def loo_cv(dataset: LabeledDataset, config: ClassifierConfig, smote_k: int = 2,
           task: str = "", regime: str = "full-segment") -> EvalReport:
    """One fold per participant; pooled metrics over the concatenated
    held-out predictions."""
    pids = np.unique(dataset.groups)
    if pids.size < 2:
        raise InvalidParameterError("leave-one-out needs at least two participants")
    folds = []
    pooled_true: list = []
    pooled_pred: list = []
    for pid in pids:
        test = dataset.subset(dataset.groups == pid)
        if len(test) == 0:
            warnings.warn(f"participant {pid} has no rows; fold skipped")
            continue
        model = fit_fold(dataset, config, int(pid), smote_k)
        labels, _ = predict_batch(model, test.X)
        acc, rec = metrics(test.y, labels)
        folds.append(FoldResult(int(pid), len(test), acc, rec))
        pooled_true.extend(test.y.tolist())
        pooled_pred.extend(labels.tolist())
    accuracy, recall = metrics(pooled_true, pooled_pred)
    return EvalReport(task=task, regime=regime, folds=tuple(folds),
                      accuracy=accuracy, recall=recall)


def truncate_segment(segment: EpisodeSegment, n: float) -> tuple[float, float]:
    """First-n-seconds bounds for failure segments; NF passes through."""
    if n <= 0:
        raise InvalidParameterError("truncation length must be positive")
    if segment.label == "NF":
        return (segment.t_start, segment.t_end)
    return (segment.t_start, min(segment.t_start + n, segment.t_end))


def eval_first_n(corpus: Corpus, task: str, config: ClassifierConfig,
                 n_values, smote_k: int = 2) -> dict:
    """Fig.-2-style evaluation: models fitted on full-duration segments, then
    failure test rows re-featurized from their first n seconds."""
    n_values = [float(n) for n in n_values]
    if any(n <= 0 for n in n_values):
        raise InvalidParameterError("truncation lengths must be positive")
    dataset, rows = corpus.dataset_for_task(task)
    pids = np.unique(dataset.groups)
    if pids.size < 2:
        raise InvalidParameterError("leave-one-out needs at least two participants")

    pooled: dict = {n: ([], []) for n in n_values}
    fold_results: dict = {n: [] for n in n_values}
    for pid in pids:
        model = fit_fold(dataset, config, int(pid), smote_k)
        test_rows = [r for r in rows if r.participant == pid]
        truth = np.array([0 if r.label == "NF" else 1 for r in test_rows], dtype=np.int64)
        for n in n_values:
            X = np.empty((len(test_rows), dataset.n_features))
            for i, row in enumerate(test_rows):
                if row.label == "NF":
                    X[i] = row.features
                else:
                    t1 = min(row.t0 + n, row.t1)
                    fx = corpus.fixations(row.session)
                    X[i] = extract_features(fx, row.t0, t1).as_array()
            labels, _ = predict_batch(model, X)
            acc, rec = metrics(truth, labels)
            fold_results[n].append(FoldResult(int(pid), len(test_rows), acc, rec))
            pooled[n][0].extend(truth.tolist())
            pooled[n][1].extend(labels.tolist())

    reports = {}
    for n in n_values:
        accuracy, recall = metrics(pooled[n][0], pooled[n][1])
        reports[n] = EvalReport(task=task, regime=f"first-{n:g}",
                                folds=tuple(fold_results[n]),
                                accuracy=accuracy, recall=recall)
    return reports


@dataclass(frozen=True)
class Window:
    """One sliding-window slice with its ground-truth label (failure iff at
    least half the window lies inside a failure period)."""

    t0: float
    t1: float
    truth: int


@dataclass(frozen=True)
class DetectionEvent:
    """One classified window from the streaming detector."""

    participant: int
    puzzle: int
    t0: float
    t1: float
    predicted: int
    score: float


def sliding_windows(session: Session, width: float, slide: float = 1.0) -> list:
    """Windows [k*slide, k*slide + width] for k = 0..floor((T-width)/slide)."""
    if width <= 0 or slide <= 0:
        raise InvalidParameterError("width and slide must be positive")
    duration = session.timeline.duration
    if duration < width:
        warnings.warn("session shorter than the window width; no windows")
        return []
    count = int(np.floor((duration - width) / slide + 1e-9)) + 1
    window_frame = session.timeline.failure_window()
    out = []
    for k in range(count):
        t0 = k * slide
        t1 = t0 + width
        truth = 0
        if window_frame is not None:
            fs, fe = window_frame
            overlap = min(t1, fe) - max(t0, fs)
            if overlap >= width / 2 - 1e-9:
                truth = 1
        out.append(Window(t0=t0, t1=t1, truth=truth))
    return out


def stream_detect(model: TrainedModel, session: Session, width: float,
                  slide: float = 1.0, debouncer: Optional[Debouncer] = None,
                  min_dwell: float = DEFAULT_MIN_DWELL_S) -> list:
    """Classify every sliding window causally: window k's features use only
    samples with t <= its end."""
    deb = debouncer or Debouncer(session.gaze, session.layout, min_dwell)
    windows = sliding_windows(session, width, slide)
    if not windows:
        return []
    X = np.empty((len(windows), model.n_features))
    for i, w in enumerate(windows):
        fx = deb.fixations_until(w.t1)
        X[i] = extract_features(fx, w.t0, w.t1).as_array()
    labels, scores = predict_batch(model, X)
    return [
        DetectionEvent(session.participant_id, session.puzzle_id,
                       w.t0, w.t1, int(l), float(s))
        for w, l, s in zip(windows, labels, scores)
    ]


@dataclass(frozen=True)
class StreamEvalResult:
    report: EvalReport
    detections: tuple


def loo_stream_eval(corpus: Corpus, task: str, config: ClassifierConfig,
                    width: float, slide: float = 1.0,
                    smote_k: int = 2) -> StreamEvalResult:
    """Train per-fold on full segments, then classify the held-out
    participant's failure-type sessions window by window."""
    ftype = _failure_type(task)
    dataset, _ = corpus.dataset_for_task(task)
    pids = np.unique(dataset.groups)
    folds = []
    detections = []
    pooled_true: list = []
    pooled_pred: list = []
    for pid in pids:
        model = fit_fold(dataset, config, int(pid), smote_k)
        fold_true: list = []
        fold_pred: list = []
        for session in corpus.failure_sessions(ftype):
            if session.participant_id != pid:
                continue
            windows, X = corpus.window_features(session, width, slide)
            labels, scores = predict_batch(model, X)
            for w, l, s in zip(windows, labels, scores):
                detections.append(
                    DetectionEvent(session.participant_id, session.puzzle_id,
                                   w.t0, w.t1, int(l), float(s))
                )
                fold_true.append(w.truth)
                fold_pred.append(int(l))
        if not fold_true:
            warnings.warn(f"participant {pid} has no {ftype} sessions")
            continue
        acc, rec = metrics(fold_true, fold_pred)
        folds.append(FoldResult(int(pid), len(fold_true), acc, rec))
        pooled_true.extend(fold_true)
        pooled_pred.extend(fold_pred)
    accuracy, recall = metrics(pooled_true, pooled_pred)
    report = EvalReport(task=task, regime=f"window-{width:g}", folds=tuple(folds),
                        accuracy=accuracy, recall=recall)
    return StreamEvalResult(report=report, detections=tuple(detections))


def interval_detection_rate(detections, corpus: Corpus, width: float) -> list:
    """Fraction of participants detected in [failure_start+o, +o+width] per
    integer offset o.

    A participant counts as detected at offset o when any of their positive
    windows starts within half a slide of failure_start + o (nearest-window
    assignment under the 1-second slide).
    """
    by_session: dict = {}
    for d in detections:
        by_session.setdefault((d.participant, d.puzzle), []).append(d)

    session_info = {}
    ftypes = set()
    for session in corpus.sessions:
        key = (session.participant_id, session.puzzle_id)
        if key not in by_session:
            continue
        window_frame = session.timeline.failure_window()
        if window_frame is None:
            raise InvalidParameterError("detections reference a failure-free session")
        ftypes.add(session.timeline.failure_type)
        session_info[key] = window_frame[0]
    if len(ftypes) > 1:
        raise InvalidParameterError("detections span multiple failure types")
    if not session_info:
        return []
    duration = FAILURE_DURATIONS[next(iter(ftypes))]
    offsets = range(int(np.floor(duration - width + 1e-9)) + 1)

    total = len(corpus.participants)
    curve = []
    for o in offsets:
        detected = set()
        for key, events in by_session.items():
            fs = session_info[key]
            lo, hi = fs + o - 0.5, fs + o + 0.5
            for d in events:
                if d.predicted == 1 and lo <= d.t0 < hi:
                    detected.add(key[0])
                    break
        curve.append((o, len(detected) / total))
    return curve
