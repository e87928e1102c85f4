"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Heavy artifacts (the committed corpus, per-fold models, stream detections)
are cached at module scope and shared across criteria.
"""

import itertools
import json
import math
import os
import time
from collections import Counter, defaultdict

import numpy as np

from conftest import BUILD_SECONDS
from gaze_sentinel import storage
from gaze_sentinel.cli import main
from gaze_sentinel.core import AoiLabel, segment_session
from gaze_sentinel.evaluate import (
    Corpus,
    eval_first_n,
    fit_fold,
    interval_detection_rate,
    loo_cv,
    loo_stream_eval,
    stream_detect,
)
from gaze_sentinel.features import build_transition_model, stationary_entropy, transition_entropy
from gaze_sentinel.learners import (
    KINDS,
    LabeledDataset,
    default_config,
    predict_batch,
    smote,
    train,
)
from gaze_sentinel.model_io import load_model, save_model
from gaze_sentinel.sim import BehaviorParams, CorpusSpec, generate_corpus

SEED = 7
WIDTH = 5.0
_STREAM_CACHE = {}


def _check(num, desc, ok, detail=""):
    status = "PASS" if ok else "FAIL"
    print(f"[acceptance] criterion {num:02d} {status}: {desc} {detail}".rstrip())
    assert ok, f"criterion {num} failed: {desc} {detail}"


def _stream_results(corpus, task):
    if task not in _STREAM_CACHE:
        _STREAM_CACHE[task] = {
            kind: loo_stream_eval(corpus, task, default_config(kind, seed=SEED), WIDTH)
            for kind in KINDS
        }
    return _STREAM_CACHE[task]


def test_criterion_01_corpus_structure(tmp_path):
    t0 = time.monotonic()
    out = tmp_path / "corpus"
    assert main(["simulate", "--participants", "26", "--seed", str(SEED),
                 "--out", str(out)]) == 0
    paths = storage.corpus_paths(out)
    headers = [storage.read_session_header(p) for p in paths]
    elapsed = time.monotonic() - t0

    counts = Counter()
    durations_ok = True
    for header in headers:
        session = storage.session_from_header(
            header, gaze=_empty_stream())
        for seg in segment_session(session):
            counts[seg.label] += 1
            if seg.label == "EF":
                durations_ok &= abs(seg.duration - 15.0) < 1e-9
            elif seg.label == "DF":
                durations_ok &= abs(seg.duration - 16.5) < 1e-9

    # spot-check that one file's sample stream parses end to end
    sample_session = storage.read_session_jsonl(paths[0])
    _check(
        1,
        "simulate --participants 26 structure",
        len(paths) == 104
        and counts == Counter({"NF": 312, "EF": 52, "DF": 52})
        and durations_ok
        and len(sample_session.gaze) > 10_000
        and elapsed < 30.0,
        f"(sessions={len(paths)}, counts={dict(counts)}, {elapsed:.1f}s)",
    )


def _empty_stream():
    from gaze_sentinel.core import GazeStream

    return GazeStream(t=np.array([]), x=np.array([]), y=np.array([]),
                      valid=np.array([], dtype=bool))


def test_criterion_02_entropy_oracle():
    def brute_stationary(seq):
        if not seq:
            return 0.0
        counts = Counter(seq)
        n = len(seq)
        return -sum((c / n) * math.log2(c / n) for c in counts.values())

    def brute_transition(seq):
        if not seq:
            return 0.0
        visits = Counter(seq)
        n = len(seq)
        rows = defaultdict(Counter)
        for a, b in zip(seq, seq[1:]):
            rows[a][b] += 1
        total = 0.0
        for state, row in rows.items():
            m = sum(row.values())
            h = -sum((c / m) * math.log2(c / m) for c in row.values())
            total += visits[state] / n * h
        return total

    labels3 = [AoiLabel.ROBOT_BODY, AoiLabel.END_EFFECTOR, AoiLabel.ROBOT_PIECES]
    checked = 0
    worst = 0.0
    for length in range(1, 9):
        for seq in itertools.product(labels3, repeat=length):
            model = build_transition_model(list(seq))
            worst = max(
                worst,
                abs(stationary_entropy(model.visit_dist) - brute_stationary(seq)),
                abs(transition_entropy(model) - brute_transition(seq)),
            )
            checked += 1

    rng = np.random.default_rng(SEED)
    labels6 = list(AoiLabel)
    for _ in range(10_000):
        n = int(rng.integers(1, 25))
        seq = tuple(labels6[i] for i in rng.integers(0, 6, n))
        model = build_transition_model(list(seq))
        worst = max(
            worst,
            abs(stationary_entropy(model.visit_dist) - brute_stationary(seq)),
            abs(transition_entropy(model) - brute_transition(seq)),
        )
        checked += 1

    _check(2, "entropies match brute-force oracle",
           worst <= 1e-12, f"({checked} sequences, worst |err|={worst:.2e})")


def test_criterion_03_smote_properties():
    rng = np.random.default_rng(SEED)
    failures = []
    for trial in range(200):
        n_min = int(rng.integers(3, 12))
        n_maj = int(rng.integers(n_min + 1, 48))
        d = int(rng.integers(2, 8))
        X = np.vstack([rng.normal(0, 1, (n_maj, d)), rng.normal(1.5, 1, (n_min, d))])
        y = np.array([0] * n_maj + [1] * n_min)
        ds = LabeledDataset(X, y, np.arange(len(y)))
        out = smote(ds, k=2, rng=rng)

        n0, n1 = out.class_counts()
        if not (n0 == n1 == n_maj):
            failures.append((trial, "counts"))
            continue
        if not np.array_equal(out.X[: len(y)], X):
            failures.append((trial, "originals"))
            continue
        Xm = X[n_maj:]
        nn = np.argsort(
            np.linalg.norm(Xm[:, None] - Xm[None, :], axis=2)
            + np.diag([np.inf] * n_min),
            axis=1, kind="stable",
        )[:, :2]
        for row in out.X[len(y):]:
            ok = False
            for i in range(n_min):
                for j in nn[i]:
                    seg = Xm[j] - Xm[i]
                    denom = float(seg @ seg)
                    if denom == 0.0:
                        ok = np.allclose(row, Xm[i], atol=1e-9)
                    else:
                        u = float((row - Xm[i]) @ seg) / denom
                        ok = (-1e-9 <= u <= 1 + 1e-9 and
                              np.allclose(row, Xm[i] + u * seg, atol=1e-9))
                    if ok:
                        break
                if ok:
                    break
            if not ok:
                failures.append((trial, "segment"))
                break
    _check(3, "SMOTE balances, preserves originals, interpolates on 2-NN segments",
           not failures, f"(200 datasets, failures={failures[:3]})")


def test_criterion_04_classifier_sanity():
    rng = np.random.default_rng(0)
    X = np.vstack([rng.normal(-2, 0.5, (30, 2)), rng.normal(2, 0.5, (30, 2))])
    separable = LabeledDataset(X, np.array([0] * 30 + [1] * 30), np.arange(60))
    train_accs = {}
    for kind in KINDS:
        model = train(default_config(kind, seed=3), separable)
        labels, _ = predict_batch(model, separable.X)
        train_accs[kind] = float((labels == separable.y).mean())

    rng = np.random.default_rng(5)

    def xor(n):
        quadrant = rng.permutation(np.repeat(np.arange(4), n // 4))
        cx = np.where(quadrant % 2 == 0, -1.0, 1.0)
        cy = np.where(quadrant < 2, -1.0, 1.0)
        pts = np.stack([cx, cy], axis=1) + rng.normal(0, 0.25, (n, 2))
        return LabeledDataset(pts, ((cx > 0) ^ (cy > 0)).astype(np.int64), np.arange(n))

    xor_train, xor_test = xor(100), xor(100)
    forest = train(default_config("forest", seed=4), xor_train)
    svm = train(default_config("svm", seed=4), xor_train)
    forest_acc = float((predict_batch(forest, xor_test.X)[0] == xor_test.y).mean())
    svm_acc = float((predict_batch(svm, xor_test.X)[0] == xor_test.y).mean())

    monotone = True
    for kind in ("gbt-a", "gbt-b"):
        model = train(default_config(kind, seed=1), xor_train)
        monotone &= bool(np.all(np.diff(model.train_loss) <= 1e-9))

    _check(
        4,
        "classifier sanity (separable, XOR, monotone GBT loss)",
        all(acc == 1.0 for acc in train_accs.values())
        and forest_acc >= 0.9 and svm_acc <= 0.6 and monotone,
        f"(train={train_accs}, xor forest={forest_acc:.2f} svm={svm_acc:.2f})",
    )


def test_criterion_05_first_n_curves(default_corpus):
    t0 = time.monotonic()
    n_values = [1, 2, 3, 4, 5]
    results = {}
    for task in ("nf-ef", "nf-df"):
        reports = eval_first_n(default_corpus, task,
                               default_config("forest", seed=SEED), n_values)
        results[task] = [reports[n].accuracy for n in n_values]
    elapsed = time.monotonic() - t0 + BUILD_SECONDS.get("default_corpus", 0.0)

    ef, df = results["nf-ef"], results["nf-df"]
    non_decreasing = all(
        curve[i + 1] >= curve[i] - 0.03
        for curve in (ef, df)
        for i in range(len(curve) - 1)
    )
    _check(
        5,
        "forest first-n accuracy floors and curve shape",
        ef[-1] >= 0.85 and df[-1] >= 0.75 and non_decreasing and elapsed < 600.0,
        f"(EF@5={ef[-1]:.3f}, DF@5={df[-1]:.3f}, "
        f"EF curve={[round(a, 3) for a in ef]}, {elapsed:.0f}s)",
    )


def test_full_segment_fold_structure(default_corpus):
    # 26 participants -> 26 folds; each NF-vs-EF test fold holds 12 NF + 2 EF
    dataset, _ = default_corpus.dataset_for_task("nf-ef")
    report = loo_cv(dataset, default_config("ada", seed=SEED), task="nf-ef")
    assert len(report.folds) == 26
    assert all(fold.n_test == 14 for fold in report.folds)


def test_criterion_06_window_ordering(default_corpus):
    lines = {}
    ok = True
    for task in ("nf-ef", "nf-df"):
        results = _stream_results(default_corpus, task)
        acc = {kind: results[kind].report.accuracy for kind in KINDS}
        rec = {kind: results[kind].report.recall for kind in KINDS}
        others_acc = max(v for k, v in acc.items() if k != "forest")
        others_rec = max(v for k, v in rec.items() if k != "svm")
        ok &= acc["forest"] >= others_acc - 0.02
        ok &= rec["svm"] >= others_rec
        lines[task] = (
            f"forest_acc={acc['forest']:.3f} (next {others_acc:.3f}), "
            f"svm_rec={rec['svm']:.3f} (next {others_rec:.3f})"
        )
    _check(6, "width-5 ordering: forest accuracy top (±0.02), svm recall top",
           ok, f"({lines})")


def test_window_example_orderings(default_corpus):
    # At width 5 on the NF-vs-EF stream: pooled forest accuracy clears the
    # simulator floor, svm recall strictly exceeds forest recall, and svm is
    # the least accurate of the five.
    results = _stream_results(default_corpus, "nf-ef")
    acc = {kind: results[kind].report.accuracy for kind in KINDS}
    rec = {kind: results[kind].report.recall for kind in KINDS}
    assert acc["forest"] >= 0.55
    assert rec["svm"] > rec["forest"]
    assert acc["svm"] == min(acc.values())


def test_criterion_07_offset_curves(default_corpus):
    argmaxes = {}
    for task, lo, hi in (("nf-ef", 3, 8), ("nf-df", 1, 6)):
        detections = _stream_results(default_corpus, task)["forest"].detections
        curve = interval_detection_rate(detections, default_corpus, WIDTH)
        offsets = [o for o, _ in curve]
        pcts = [p for _, p in curve]
        argmaxes[task] = offsets[int(np.argmax(pcts))]
    _check(
        7,
        "offset-curve argmax: EF in 3..8, DF in 1..6",
        3 <= argmaxes["nf-ef"] <= 8 and 1 <= argmaxes["nf-df"] <= 6,
        f"(EF argmax={argmaxes['nf-ef']}, DF argmax={argmaxes['nf-df']})",
    )


def test_criterion_08_null_model_guard():
    """With failure deltas zeroed, the spec requires every classifier's LOO
    accuracy in [0.4, 0.6].

    The margin-based classifier lands near 0.5, but the tree ensembles
    converge to majority-like predictions on signal-free data (SMOTE's
    interpolants concentrate the minority support, so held-out rows fall in
    majority-voted regions) and score near the 0.857 majority rate. That
    behaviour reproduces on pure iid Gaussian nulls outside the simulator,
    so the band is unattainable for this pipeline; see the decisions ledger.
    """
    spec = CorpusSpec(behavior=BehaviorParams.default().zero_failure_deltas())
    corpus = Corpus(generate_corpus(spec))
    accuracies = {}
    for task in ("nf-ef", "nf-df"):
        dataset, _ = corpus.dataset_for_task(task)
        for kind in KINDS:
            report = loo_cv(dataset, default_config(kind, seed=SEED), task=task)
            accuracies[(task, kind)] = report.accuracy
    in_band = {k: 0.4 <= v <= 0.6 for k, v in accuracies.items()}
    detail = {f"{t}/{k}": round(v, 3) for (t, k), v in accuracies.items()}
    _check(8, "null-model guard: all LOO accuracies in [0.4, 0.6]",
           all(in_band.values()), f"({detail})")


def test_criterion_09_determinism(tmp_path, mini_corpus):
    outputs = []
    for run in ("a", "b"):
        base = tmp_path / run
        corpus_dir = base / "corpus"
        assert main(["simulate", "--participants", "3", "--seed", "11",
                     "--out", str(corpus_dir)]) == 0
        features = base / "features.csv"
        assert main(["extract", "--corpus", str(corpus_dir),
                     "--out", str(features)]) == 0
        reports = base / "reports"
        assert main(["eval", "--corpus", str(corpus_dir), "--mode", "first-n",
                     "--task", "nf-ef", "--classifier", "ada", "--n", "3..5",
                     "--seed", "3", "--out", str(reports)]) == 0
        outputs.append({
            "features": features.read_bytes(),
            "report": (reports / "report_first_n_nf-ef.csv").read_bytes(),
        })
    byte_identical = outputs[0] == outputs[1]

    ds, _ = mini_corpus.dataset_for_task("nf-ef")
    rng = np.random.default_rng(SEED)
    model = train(default_config("forest", seed=SEED), smote(ds, rng=rng))
    path = tmp_path / "model.json"
    save_model(model, path)
    loaded = load_model(path)
    probe = np.random.default_rng(1).normal(0, 2, (1000, ds.n_features))
    la, sa = predict_batch(model, probe)
    lb, sb = predict_batch(loaded, probe)
    roundtrip_exact = bool(np.array_equal(la, lb) and np.array_equal(sa, sb))

    _check(9, "end-to-end byte-identical reports and bit-exact model round-trip",
           byte_identical and roundtrip_exact,
           f"(reports_identical={byte_identical}, roundtrip={roundtrip_exact})")


def test_criterion_10_causality(default_corpus):
    from gaze_sentinel.core import GazeStream, Session, Timeline

    ds, _ = default_corpus.dataset_for_task("nf-ef")
    model = fit_fold(ds, default_config("forest", seed=SEED), held_out=1)
    sessions = default_corpus.failure_sessions("EF")
    rng = np.random.default_rng(SEED)
    checked = 0
    ok = True
    while checked < 100 and ok:
        session = sessions[int(rng.integers(0, len(sessions)))]
        full = stream_detect(model, session, WIDTH, 1.0,
                             debouncer=default_corpus.debouncer(session))
        k = int(rng.integers(3, len(full)))
        cut = full[k].t1
        keep = session.gaze.t <= cut
        truncated = Session(
            participant_id=session.participant_id,
            puzzle_id=session.puzzle_id,
            gaze=GazeStream(t=session.gaze.t[keep], x=session.gaze.x[keep],
                            y=session.gaze.y[keep], valid=session.gaze.valid[keep]),
            layout=session.layout,
            timeline=Timeline(
                events=tuple(e for e in session.timeline.events if e.t <= cut),
                duration=cut,
                failure_type=session.timeline.failure_type,
                failure_piece=session.timeline.failure_piece,
            ),
        )
        partial = stream_detect(model, truncated, WIDTH, 1.0)
        ok = partial == full[: k + 1]
        checked += 1
    _check(10, "stream detection is causal under truncation",
           ok and checked == 100, f"({checked} random truncation points)")
