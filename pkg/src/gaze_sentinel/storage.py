"""On-disk formats: session JSONL, feature CSV, report CSV, and detection
JSONL.

Every output embeds the tool version, the resolved run configuration, and
its fingerprint, and is written atomically (temp file + rename). Formatting
is deterministic, so equal configurations produce byte-identical files.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from typing import Optional

import numpy as np

from . import __version__
from .core import (
    AoiLabel,
    AoiLayout,
    GazeStream,
    Rect,
    RobotEvent,
    Session,
    Timeline,
)
from .errors import InvalidParameterError, MalformedStreamError
from .evaluate import SegmentRow
from .features import FEATURE_NAMES, FEATURE_SCHEMA_VERSION

SESSION_SCHEMA_VERSION = 1


def _fmt(value: float) -> str:
    return repr(float(value))


def atomic_write_text(path, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def config_fingerprint(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def provenance_lines(config: Optional[dict]) -> list:
    config = config or {}
    return [
        f"# gaze-sentinel {__version__}",
        f"# fingerprint={config_fingerprint(config)}",
        f"# config={json.dumps(config, sort_keys=True, separators=(',', ':'))}",
    ]


def write_session_jsonl(session: Session, path, config: Optional[dict] = None) -> None:
    header = {
        "schema": SESSION_SCHEMA_VERSION,
        "kind": "session",
        "participant": session.participant_id,
        "puzzle": session.puzzle_id,
        "duration": session.timeline.duration,
        "failure_type": session.timeline.failure_type,
        "failure_piece": session.timeline.failure_piece,
        "layout": [
            [lbl.token, rect.x0, rect.y0, rect.x1, rect.y1]
            for lbl, rect in session.layout.entries
        ],
        "timeline": [
            [e.kind, e.piece, e.t, e.failure_type]
            for e in session.timeline.events
        ],
        "provenance": {
            "tool_version": __version__,
            "fingerprint": config_fingerprint(config or {}),
            "config": config or {},
        },
    }
    lines = [json.dumps(header, sort_keys=True, separators=(",", ":"))]
    g = session.gaze
    for t, x, y, v in zip(g.t, g.x, g.y, g.valid):
        flag = "true" if v else "false"
        lines.append(f'{{"t":{t:.6f},"x":{x:.3f},"y":{y:.3f},"valid":{flag}}}')
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_session_header(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        line = fh.readline()
    try:
        header = json.loads(line)
    except ValueError as exc:
        raise MalformedStreamError(f"cannot parse session header in {path}: {exc}")
    if header.get("kind") != "session":
        raise MalformedStreamError(f"{path} is not a session file")
    if header.get("schema") != SESSION_SCHEMA_VERSION:
        raise MalformedStreamError(
            f"unsupported session schema {header.get('schema')!r} in {path}"
        )
    return header


def session_from_header(header: dict, gaze: GazeStream) -> Session:
    layout = AoiLayout(
        entries=tuple(
            (AoiLabel.from_token(token), Rect(x0, y0, x1, y1))
            for token, x0, y0, x1, y1 in header["layout"]
        )
    )
    events = tuple(
        RobotEvent(kind, piece, t, failure_type=ft)
        for kind, piece, t, ft in header["timeline"]
    )
    timeline = Timeline(
        events=events,
        duration=header["duration"],
        failure_type=header.get("failure_type"),
        failure_piece=header.get("failure_piece"),
    )
    return Session(
        participant_id=header["participant"],
        puzzle_id=header["puzzle"],
        gaze=gaze,
        layout=layout,
        timeline=timeline,
    )


def read_session_jsonl(path) -> Session:
    with open(path, encoding="utf-8") as fh:
        header_line = fh.readline()
        header = json.loads(header_line)
        t, x, y, valid = [], [], [], []
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            t.append(rec["t"])
            x.append(rec["x"])
            y.append(rec["y"])
            valid.append(rec["valid"])
    if header.get("kind") != "session":
        raise MalformedStreamError(f"{path} is not a session file")
    if header.get("schema") != SESSION_SCHEMA_VERSION:
        raise MalformedStreamError(
            f"unsupported session schema {header.get('schema')!r} in {path}"
        )
    gaze = GazeStream(
        t=np.array(t), x=np.array(x), y=np.array(y), valid=np.array(valid, dtype=bool)
    )
    return session_from_header(header, gaze)


def session_filename(participant: int, puzzle: int) -> str:
    return f"session_p{participant:03d}_z{puzzle}.jsonl"


def write_corpus(sessions, out_dir, config: Optional[dict] = None) -> list:
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    for session in sessions:
        path = os.path.join(
            out_dir, session_filename(session.participant_id, session.puzzle_id)
        )
        write_session_jsonl(session, path, config)
        paths.append(path)
    manifest = {
        "kind": "corpus",
        "schema": SESSION_SCHEMA_VERSION,
        "sessions": [os.path.basename(p) for p in paths],
        "provenance": {
            "tool_version": __version__,
            "fingerprint": config_fingerprint(config or {}),
            "config": config or {},
        },
    }
    atomic_write_text(
        os.path.join(out_dir, "manifest.json"),
        json.dumps(manifest, sort_keys=True, indent=1) + "\n",
    )
    return paths


def corpus_paths(corpus_dir) -> list:
    manifest_path = os.path.join(corpus_dir, "manifest.json")
    if os.path.exists(manifest_path):
        with open(manifest_path, encoding="utf-8") as fh:
            manifest = json.load(fh)
        return [os.path.join(corpus_dir, name) for name in manifest["sessions"]]
    return sorted(
        os.path.join(corpus_dir, name)
        for name in os.listdir(corpus_dir)
        if name.endswith(".jsonl")
    )


def read_corpus(corpus_dir) -> list:
    paths = corpus_paths(corpus_dir)
    if not paths:
        raise InvalidParameterError(f"no session files found in {corpus_dir}")
    return [read_session_jsonl(p) for p in paths]


def write_feature_csv(rows, path, config: Optional[dict] = None) -> None:
    lines = provenance_lines(config)
    lines.append(f"# feature_schema={FEATURE_SCHEMA_VERSION}")
    lines.append("participant,puzzle,piece,label,t0,t1," + ",".join(FEATURE_NAMES))
    for r in rows:
        values = ",".join(_fmt(v) for v in r.features)
        lines.append(
            f"{r.participant},{r.puzzle},{r.piece},{r.label},"
            f"{_fmt(r.t0)},{_fmt(r.t1)},{values}"
        )
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_feature_csv(path) -> list:
    rows = []
    with open(path, encoding="utf-8") as fh:
        header = None
        for line in fh:
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            if header is None:
                header = line.split(",")
                expected = ["participant", "puzzle", "piece", "label", "t0", "t1"]
                if header[: len(expected)] != expected:
                    raise InvalidParameterError(f"unexpected feature CSV header in {path}")
                continue
            parts = line.split(",")
            rows.append(
                SegmentRow(
                    participant=int(parts[0]),
                    puzzle=int(parts[1]),
                    piece=int(parts[2]),
                    label=parts[3],
                    t0=float(parts[4]),
                    t1=float(parts[5]),
                    features=np.array([float(v) for v in parts[6:]]),
                )
            )
    if not rows:
        raise InvalidParameterError(f"feature CSV {path} holds no rows")
    return rows


def write_report_csv(path, entries, config: Optional[dict] = None) -> None:
    """entries: iterable of (task, classifier, n_or_width, EvalReport)."""
    lines = provenance_lines(config)
    lines.append("task,classifier,n_or_width,fold,accuracy,recall")

    def fmt_recall(value) -> str:
        return "" if value is None else _fmt(value)

    for task, classifier, n_or_width, report in entries:
        for fold in report.folds:
            lines.append(
                f"{task},{classifier},{n_or_width},{fold.participant},"
                f"{_fmt(fold.accuracy)},{fmt_recall(fold.recall)}"
            )
        lines.append(
            f"{task},{classifier},{n_or_width},pooled,"
            f"{_fmt(report.accuracy)},{fmt_recall(report.recall)}"
        )
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_report_csv(path) -> list:
    rows = []
    with open(path, encoding="utf-8") as fh:
        header = None
        for line in fh:
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            if header is None:
                header = line.split(",")
                continue
            task, classifier, n_or_width, fold, accuracy, recall = line.split(",")
            rows.append(
                {
                    "task": task,
                    "classifier": classifier,
                    "n_or_width": n_or_width,
                    "fold": fold,
                    "accuracy": float(accuracy),
                    "recall": float(recall) if recall else None,
                }
            )
    return rows


def write_offsets_csv(path, entries, config: Optional[dict] = None) -> None:
    """entries: iterable of (task, classifier, width, offset_s, pct_detected)."""
    lines = provenance_lines(config)
    lines.append("task,classifier,width,offset_s,pct_detected")
    for task, classifier, width, offset, pct in entries:
        lines.append(f"{task},{classifier},{_fmt(width)},{offset},{_fmt(pct)}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_detections_jsonl(path, detections, config: Optional[dict] = None) -> None:
    header = {
        "kind": "detections",
        "schema": 1,
        "provenance": {
            "tool_version": __version__,
            "fingerprint": config_fingerprint(config or {}),
            "config": config or {},
        },
    }
    lines = [json.dumps(header, sort_keys=True, separators=(",", ":"))]
    for d in detections:
        lines.append(
            json.dumps(
                {
                    "participant": d.participant,
                    "puzzle": d.puzzle,
                    "t0": d.t0,
                    "t1": d.t1,
                    "predicted": d.predicted,
                    "score": d.score,
                },
                sort_keys=True,
                separators=(",", ":"),
            )
        )
    atomic_write_text(path, "\n".join(lines) + "\n")
