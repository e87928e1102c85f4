"""Core gaze domain: AOI geometry, sample streams, fixation debouncing, and
robot-episode segmentation.

Coordinates are scene millimeters; timestamps are seconds from session start.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import Iterable, Optional

import numpy as np

from .errors import (
    InvalidParameterError,
    MalformedStreamError,
    MalformedTimelineError,
)

EF_DURATION_S = 15.0
DF_DURATION_S = 16.5
FAILURE_DURATIONS = {"EF": EF_DURATION_S, "DF": DF_DURATION_S}
SEGMENT_LABELS = ("NF", "EF", "DF")

DEFAULT_MIN_DWELL_S = 0.1
DEFAULT_SAMPLE_RATE_HZ = 200.0
# A run interrupted by less than this much missing/invalid data stays one run.
INVALID_BRIDGE_S = 0.05


class AoiLabel(IntEnum):
    """The six scene regions a gaze point can be attributed to.

    ``ELSEWHERE`` is the catch-all: any point outside every layout rectangle
    maps to it, so each sample carries exactly one label.
    """

    ROBOT_BODY = 0
    END_EFFECTOR = 1
    ROBOT_PIECES = 2
    PARTICIPANT_PIECES = 3
    PUZZLE_BOARD = 4
    ELSEWHERE = 5

    @property
    def token(self) -> str:
        return self.name.lower()

    @classmethod
    def from_token(cls, token: str) -> "AoiLabel":
        try:
            return cls[token.upper()]
        except KeyError:
            raise InvalidParameterError(f"unknown AOI label {token!r}") from None


N_AOI = len(AoiLabel)


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle, closed on lower/left edges and open on
    upper/right ones."""

    x0: float
    y0: float
    x1: float
    y1: float

    def __post_init__(self):
        if not (self.x1 > self.x0 and self.y1 > self.y0):
            raise InvalidParameterError(f"degenerate rectangle {self}")

    def contains(self, x: float, y: float) -> bool:
        return self.x0 <= x < self.x1 and self.y0 <= y < self.y1

    @property
    def center(self) -> tuple[float, float]:
        return (0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))


@dataclass(frozen=True)
class AoiLayout:
    """Ordered (label, rectangle) pairs; earlier entries win on overlap.

    ``ELSEWHERE`` never appears in the list — it is the implicit remainder.
    """

    entries: tuple

    def __post_init__(self):
        entries = tuple((AoiLabel(lbl), rect) for lbl, rect in self.entries)
        object.__setattr__(self, "entries", entries)
        seen = set()
        for lbl, rect in entries:
            if lbl is AoiLabel.ELSEWHERE:
                raise InvalidParameterError("ELSEWHERE must not carry a rectangle")
            if lbl in seen:
                raise InvalidParameterError(f"duplicate rectangle for {lbl.token}")
            if not isinstance(rect, Rect):
                raise InvalidParameterError("layout entries must hold Rect values")
            seen.add(lbl)

    def rect_for(self, label: AoiLabel) -> Optional[Rect]:
        for lbl, rect in self.entries:
            if lbl is label:
                return rect
        return None

    def label_point(self, x: float, y: float) -> AoiLabel:
        for lbl, rect in self.entries:
            if rect.contains(x, y):
                return lbl
        return AoiLabel.ELSEWHERE

    def label_points(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Vectorised first-wins labelling; returns int codes."""
        codes = np.full(len(x), int(AoiLabel.ELSEWHERE), dtype=np.int64)
        # Assign in reverse order so earlier entries overwrite later ones.
        for lbl, rect in reversed(self.entries):
            inside = (x >= rect.x0) & (x < rect.x1) & (y >= rect.y0) & (y < rect.y1)
            codes[inside] = int(lbl)
        return codes


def hit_test(point, layout: AoiLayout) -> AoiLabel:
    """Map a scene point to the first containing rectangle's label.

    Total function: points outside every rectangle (including non-finite
    coordinates) map to ``ELSEWHERE``.
    """
    x, y = point
    return layout.label_point(float(x), float(y))


@dataclass(frozen=True)
class GazeSample:
    """One timestamped gaze point; ``valid`` mirrors tracker confidence."""

    t: float
    x: float
    y: float
    valid: bool = True


@dataclass(eq=False)
class GazeStream:
    """Columnar gaze recording with strictly increasing timestamps."""

    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    valid: np.ndarray

    def __post_init__(self):
        self.t = np.ascontiguousarray(self.t, dtype=np.float64)
        self.x = np.ascontiguousarray(self.x, dtype=np.float64)
        self.y = np.ascontiguousarray(self.y, dtype=np.float64)
        self.valid = np.ascontiguousarray(self.valid, dtype=bool)
        n = self.t.shape[0]
        if any(a.ndim != 1 or a.shape[0] != n for a in (self.x, self.y, self.valid)):
            raise MalformedStreamError("stream columns must be 1-D and equal length")
        if n and self.t[0] < 0:
            raise MalformedStreamError("timestamps must be non-negative")
        if n > 1 and not np.all(np.diff(self.t) > 0):
            raise MalformedStreamError("timestamps must be strictly increasing")
        for a in (self.t, self.x, self.y, self.valid):
            a.flags.writeable = False

    def __len__(self) -> int:
        return self.t.shape[0]

    @classmethod
    def from_samples(cls, samples: Iterable[GazeSample]) -> "GazeStream":
        samples = list(samples)
        return cls(
            t=np.array([s.t for s in samples], dtype=np.float64),
            x=np.array([s.x for s in samples], dtype=np.float64),
            y=np.array([s.y for s in samples], dtype=np.float64),
            valid=np.array([s.valid for s in samples], dtype=bool),
        )

    def samples(self) -> list[GazeSample]:
        return [
            GazeSample(float(t), float(x), float(y), bool(v))
            for t, x, y, v in zip(self.t, self.x, self.y, self.valid)
        ]

    def sample_period(self) -> float:
        if len(self) < 2:
            return 1.0 / DEFAULT_SAMPLE_RATE_HZ
        # Rounded to 1 ns so prefixes of a stream estimate the same period.
        return round(float(np.median(np.diff(self.t))), 9)


@dataclass(frozen=True)
class FixationEvent:
    """A debounced dwell on one AOI."""

    aoi: AoiLabel
    start: float
    duration: float

    @property
    def end(self) -> float:
        return self.start + self.duration


class Debouncer:
    """Run table over a labelled stream, supporting whole-stream and causal
    (prefix-limited) fixation extraction.

    Invalid samples are skipped; a run interrupted by less than
    ``INVALID_BRIDGE_S`` of missing data is treated as continuous. Runs
    shorter than ``min_dwell`` are dropped and adjacent surviving runs with
    equal labels are merged (duration sums, gap time is not counted).
    """

    def __init__(self, stream: GazeStream, layout: AoiLayout,
                 min_dwell: float = DEFAULT_MIN_DWELL_S):
        if min_dwell <= 0:
            raise InvalidParameterError("min_dwell must be positive")
        if len(stream) > 1 and not np.all(np.diff(stream.t) > 0):
            raise MalformedStreamError("timestamps must be strictly increasing")
        self.min_dwell = float(min_dwell)
        self._period = stream.sample_period()

        mask = np.asarray(stream.valid, dtype=bool)
        t = stream.t[mask]
        self._t = t
        if t.size == 0:
            self._run_first = np.empty(0, dtype=np.int64)
            self._run_code = np.empty(0, dtype=np.int64)
            self._run_t0 = np.empty(0, dtype=np.float64)
            self._run_t1 = np.empty(0, dtype=np.float64)
            return
        codes = layout.label_points(stream.x[mask], stream.y[mask])
        if t.size == 1:
            starts = np.array([0], dtype=np.int64)
        else:
            gap_break = np.diff(t) >= (INVALID_BRIDGE_S + self._period)
            label_break = codes[1:] != codes[:-1]
            starts = np.concatenate(
                [[0], np.flatnonzero(gap_break | label_break) + 1]
            ).astype(np.int64)
        lasts = np.concatenate([starts[1:] - 1, [t.size - 1]])
        self._run_first = starts
        self._run_code = codes[starts]
        self._run_t0 = t[starts]
        self._run_t1 = t[lasts]

    @property
    def period(self) -> float:
        return self._period

    def fixations(self) -> list[FixationEvent]:
        return self._assemble(len(self._run_first), None)

    def fixations_until(self, t_end: float) -> list[FixationEvent]:
        """Debounce using only samples with t <= t_end (causal prefix)."""
        p = int(np.searchsorted(self._t, t_end, side="right"))
        if p == 0:
            return []
        n_runs = int(np.searchsorted(self._run_first, p, side="left"))
        return self._assemble(n_runs, float(self._t[p - 1]))

    def _assemble(self, n_runs: int, last_t1: Optional[float]) -> list[FixationEvent]:
        out_code: list[int] = []
        out_t0: list[float] = []
        out_dur: list[float] = []
        for i in range(n_runs):
            t1 = self._run_t1[i]
            if last_t1 is not None and i == n_runs - 1 and last_t1 < t1:
                t1 = last_t1
            dur = float(t1 - self._run_t0[i] + self._period)
            if dur < self.min_dwell - 1e-12:
                continue
            code = int(self._run_code[i])
            if out_code and out_code[-1] == code:
                out_dur[-1] += dur
            else:
                out_code.append(code)
                out_t0.append(float(self._run_t0[i]))
                out_dur.append(float(dur))
        return [
            FixationEvent(AoiLabel(c), s, d)
            for c, s, d in zip(out_code, out_t0, out_dur)
        ]


def debounce(stream: GazeStream, layout: AoiLayout,
             min_dwell: float = DEFAULT_MIN_DWELL_S) -> list[FixationEvent]:
    """Label valid samples, merge runs, drop sub-threshold dwells, and merge
    adjacent surviving runs with equal labels."""
    return Debouncer(stream, layout, min_dwell).fixations()


EVENT_KINDS = ("pickup_start", "placement_done", "failure_start", "failure_end")


@dataclass(frozen=True)
class RobotEvent:
    """One timestamped robot-action event."""

    kind: str
    piece: int
    t: float
    failure_type: Optional[str] = None

    def __post_init__(self):
        if self.kind not in EVENT_KINDS:
            raise MalformedTimelineError(f"unknown event kind {self.kind!r}")
        if not 1 <= self.piece <= 4:
            raise MalformedTimelineError(f"piece index {self.piece} out of range")
        is_failure = self.kind in ("failure_start", "failure_end")
        if is_failure and self.failure_type not in FAILURE_DURATIONS:
            raise MalformedTimelineError("failure events must carry a failure type")
        if not is_failure and self.failure_type is not None:
            raise MalformedTimelineError("non-failure events must not carry a failure type")


@dataclass(frozen=True)
class Timeline:
    """Ordered robot-action events plus the session's declared scenario."""

    events: tuple
    duration: float
    failure_type: Optional[str] = None
    failure_piece: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))
        ts = [e.t for e in self.events]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise MalformedTimelineError("timeline events must be strictly ordered")
        if ts and self.duration < ts[-1]:
            raise MalformedTimelineError("duration precedes the final event")
        if (self.failure_type is None) != (self.failure_piece is None):
            raise MalformedTimelineError("failure type and piece must be declared together")
        if self.failure_type is not None and self.failure_type not in FAILURE_DURATIONS:
            raise MalformedTimelineError(f"unknown failure type {self.failure_type!r}")

    def failure_window(self) -> Optional[tuple[float, float]]:
        start = next((e.t for e in self.events if e.kind == "failure_start"), None)
        end = next((e.t for e in self.events if e.kind == "failure_end"), None)
        if start is None or end is None:
            return None
        return (start, end)


@dataclass(eq=False)
class Session:
    """One participant-puzzle recording: gaze stream, AOI layout, timeline."""

    participant_id: int
    puzzle_id: int
    gaze: GazeStream
    layout: AoiLayout
    timeline: Timeline


@dataclass(frozen=True)
class EpisodeSegment:
    """One robot pick-and-place interval with its ground-truth label."""

    participant_id: int
    puzzle_id: int
    piece_index: int
    label: str
    t_start: float
    t_end: float

    def __post_init__(self):
        if self.label not in SEGMENT_LABELS:
            raise InvalidParameterError(f"unknown segment label {self.label!r}")
        if not self.t_end > self.t_start:
            raise InvalidParameterError("segment must have positive duration")

    @property
    def duration(self) -> float:
        return self.t_end - self.t_start


def segment_session(session: Session) -> list[EpisodeSegment]:
    """Emit one labelled segment per robot piece.

    NF bounds span the pick-and-place action; EF/DF bounds start at the
    failure onset and extend for the canonical failure duration.
    """
    tl = session.timeline
    pickups: dict[int, float] = {}
    placements: dict[int, float] = {}
    fail_start: dict[int, RobotEvent] = {}
    fail_end: dict[int, RobotEvent] = {}
    for e in tl.events:
        bucket = {
            "pickup_start": pickups,
            "placement_done": placements,
            "failure_start": fail_start,
            "failure_end": fail_end,
        }[e.kind]
        if e.piece in bucket:
            raise MalformedTimelineError(f"duplicate {e.kind} for piece {e.piece}")
        bucket[e.piece] = e if e.kind.startswith("failure") else e.t

    for piece in range(1, 5):
        if piece not in pickups or piece not in placements:
            raise MalformedTimelineError(f"piece {piece} lacks pickup/placement events")
        if placements[piece] <= pickups[piece]:
            raise MalformedTimelineError(f"piece {piece} placement precedes pickup")

    if tl.failure_piece is not None and tl.failure_piece not in fail_start:
        raise MalformedTimelineError(
            f"declared failure on piece {tl.failure_piece} has no failure_start event"
        )
    for piece, ev in fail_start.items():
        if tl.failure_piece != piece or tl.failure_type != ev.failure_type:
            raise MalformedTimelineError("failure events disagree with declared scenario")
        if piece not in fail_end:
            raise MalformedTimelineError(f"failure on piece {piece} never ends")
        span = fail_end[piece].t - ev.t
        if abs(span - FAILURE_DURATIONS[ev.failure_type]) > 1e-9:
            raise MalformedTimelineError(
                f"{ev.failure_type} period lasts {span:.6f}s instead of "
                f"{FAILURE_DURATIONS[ev.failure_type]}s"
            )

    segments = []
    for piece in range(1, 5):
        if piece in fail_start:
            ev = fail_start[piece]
            t0 = ev.t
            t1 = t0 + FAILURE_DURATIONS[ev.failure_type]
            label = ev.failure_type
        else:
            t0, t1, label = pickups[piece], placements[piece], "NF"
        segments.append(
            EpisodeSegment(session.participant_id, session.puzzle_id, piece, label, t0, t1)
        )
    return segments
