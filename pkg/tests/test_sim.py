from collections import Counter

import numpy as np
import pytest

from gaze_sentinel.core import AoiLabel, debounce, segment_session
from gaze_sentinel.errors import InvalidParameterError
from gaze_sentinel.sim import (
    BehaviorParams,
    CorpusSpec,
    DEFAULT_LAYOUT,
    LATIN_SQUARE,
    ScenarioCondition,
    TimingParams,
    build_session,
    build_timeline,
    draw_traits,
    generate_corpus,
    latin_square_schedule,
    nf_probe_session,
)


def cond(ft, timing):
    return ScenarioCondition(ft, timing)


class TestLatinSquare:
    def test_row_one(self):
        assert latin_square_schedule(1) == (
            cond("EF", "early"), cond("EF", "late"),
            cond("DF", "late"), cond("DF", "early"),
        )

    def test_row_two(self):
        assert latin_square_schedule(2) == (
            cond("EF", "late"), cond("DF", "early"),
            cond("EF", "early"), cond("DF", "late"),
        )

    def test_cycle_repeats_every_four(self):
        assert latin_square_schedule(5) == latin_square_schedule(1)
        assert latin_square_schedule(14) == latin_square_schedule(2)

    def test_rejects_nonpositive_ids(self):
        with pytest.raises(InvalidParameterError):
            latin_square_schedule(0)

    def test_each_participant_covers_all_conditions(self):
        for pid in range(1, 9):
            schedule = latin_square_schedule(pid)
            assert len({(c.failure_type, c.timing) for c in schedule}) == 4

    def test_four_consecutive_participants_cover_each_position(self):
        for start in range(1, 6):
            for puzzle in range(4):
                conditions = {
                    (latin_square_schedule(pid)[puzzle].failure_type,
                     latin_square_schedule(pid)[puzzle].timing)
                    for pid in range(start, start + 4)
                }
                assert len(conditions) == 4

    def test_square_is_latin(self):
        for puzzle in range(4):
            column = {(row[puzzle].failure_type, row[puzzle].timing)
                      for row in LATIN_SQUARE}
            assert len(column) == 4

    def test_timing_to_piece(self):
        assert cond("EF", "early").piece == 1
        assert cond("DF", "late").piece == 3


class TestTimeline:
    def test_ef_early_failure_window(self):
        rng = np.random.default_rng(0)
        tl = build_timeline(cond("EF", "early"), TimingParams(), rng)
        fs, fe = tl.failure_window()
        assert fe - fs == pytest.approx(15.0, abs=1e-12)
        assert tl.failure_piece == 1
        segs = [e for e in tl.events if e.kind == "failure_start"]
        assert segs[0].piece == 1

    def test_df_late_adds_16_5(self):
        rng = np.random.default_rng(1)
        tl = build_timeline(cond("DF", "late"), TimingParams(), rng)
        fs, fe = tl.failure_window()
        assert fe - fs == pytest.approx(16.5, abs=1e-12)
        assert tl.failure_piece == 3

    def test_structure_four_pickups_and_placements(self):
        rng = np.random.default_rng(2)
        for c in (cond("EF", "early"), cond("DF", "early"), cond("EF", "late")):
            tl = build_timeline(c, TimingParams(), rng)
            kinds = Counter(e.kind for e in tl.events)
            assert kinds["pickup_start"] == 4
            assert kinds["placement_done"] == 4
            assert kinds["failure_start"] == 1
            assert kinds["failure_end"] == 1

    def test_session_duration_near_three_minutes(self):
        rng = np.random.default_rng(3)
        durations = [
            build_timeline(cond("EF", "early"), TimingParams(), np.random.default_rng(i)).duration
            for i in range(20)
        ]
        assert 140.0 < min(durations) and max(durations) < 220.0


class TestGazeSynthesis:
    def test_same_seed_bit_identical(self):
        behavior = BehaviorParams.default()
        a = build_session(3, 2, cond("EF", "late"), behavior, TimingParams(), 7)
        b = build_session(3, 2, cond("EF", "late"), behavior, TimingParams(), 7)
        np.testing.assert_array_equal(a.gaze.t, b.gaze.t)
        np.testing.assert_array_equal(a.gaze.x, b.gaze.x)
        np.testing.assert_array_equal(a.gaze.valid, b.gaze.valid)
        assert a.timeline == b.timeline

    def test_different_seed_differs(self):
        behavior = BehaviorParams.default()
        a = build_session(3, 2, cond("EF", "late"), behavior, TimingParams(), 7)
        b = build_session(3, 2, cond("EF", "late"), behavior, TimingParams(), 8)
        assert not np.array_equal(a.gaze.x, b.gaze.x)

    def test_samples_cover_session_at_rate(self):
        behavior = BehaviorParams.default()
        s = build_session(1, 1, cond("EF", "early"), behavior, TimingParams(), 7)
        expected = int(round(s.timeline.duration * behavior.sample_rate_hz))
        assert len(s.gaze) == expected
        assert s.gaze.t[0] == 0.0
        assert s.gaze.t[-1] < s.timeline.duration

    def test_invalid_rate_close_to_configured(self):
        behavior = BehaviorParams.default()
        s = build_session(2, 1, cond("DF", "early"), behavior, TimingParams(), 7)
        rate = 1.0 - np.mean(s.gaze.valid)
        assert abs(rate - behavior.invalid_rate) < 0.01

    def test_valid_points_land_on_scene_aois(self):
        behavior = BehaviorParams.default()
        s = build_session(4, 3, cond("DF", "late"), behavior, TimingParams(), 7)
        codes = DEFAULT_LAYOUT.label_points(
            s.gaze.x[s.gaze.valid], s.gaze.y[s.gaze.valid]
        )
        # every AOI should be visited in a 3-minute session
        assert set(np.unique(codes)) == set(int(a) for a in AoiLabel)

    def test_dwells_survive_debouncing(self):
        behavior = BehaviorParams.default()
        s = build_session(5, 1, cond("EF", "early"), behavior, TimingParams(), 7)
        fx = debounce(s.gaze, s.layout)
        assert len(fx) > 50
        assert all(f.duration >= 0.1 - 1e-9 for f in fx)


class TestCorpus:
    def test_single_participant_covers_conditions(self):
        sessions = generate_corpus(CorpusSpec(participants=1, master_seed=5))
        assert len(sessions) == 4
        conditions = {
            (s.timeline.failure_type, s.timeline.failure_piece) for s in sessions
        }
        assert conditions == {("EF", 1), ("EF", 3), ("DF", 3), ("DF", 1)}

    def test_segment_counts_per_participant(self, mini_corpus):
        per_participant = Counter()
        for session in mini_corpus.sessions:
            for seg in segment_session(session):
                per_participant[(seg.participant_id, seg.label)] += 1
        for pid in {s.participant_id for s in mini_corpus.sessions}:
            assert per_participant[(pid, "NF")] == 12
            assert per_participant[(pid, "EF")] == 2
            assert per_participant[(pid, "DF")] == 2

    def test_same_spec_reproduces_corpus(self):
        a = generate_corpus(CorpusSpec(participants=2, master_seed=13))
        b = generate_corpus(CorpusSpec(participants=2, master_seed=13))
        for sa, sb in zip(a, b):
            np.testing.assert_array_equal(sa.gaze.x, sb.gaze.x)
            assert sa.timeline == sb.timeline

    def test_participant_count_positive(self):
        with pytest.raises(InvalidParameterError):
            generate_corpus(CorpusSpec(participants=0))

    def test_failure_shift_rate_exceeds_baseline(self, default_corpus):
        # Monte-Carlo over the 104 committed sessions: mean shift rate over
        # EF failure periods exceeds the NF mean.
        rows = default_corpus.segment_rows()
        ef = np.array([r.features[0] for r in rows if r.label == "EF"])
        nf = np.array([r.features[0] for r in rows if r.label == "NF"])
        assert len(ef) >= 50
        assert ef.mean() > nf.mean() + 0.2

    def test_null_profile_removes_failure_shift(self):
        from gaze_sentinel.evaluate import Corpus

        spec = CorpusSpec(participants=6, master_seed=21,
                          behavior=BehaviorParams.default().zero_failure_deltas())
        corpus = Corpus(generate_corpus(spec))
        rows = corpus.segment_rows()
        ef = np.array([r.features[0] for r in rows if r.label == "EF"])
        nf = np.array([r.features[0] for r in rows if r.label == "NF"])
        assert abs(ef.mean() - nf.mean()) < 0.15


class TestBehaviorProfile:
    def test_default_profile_roundtrips_through_dict(self):
        params = BehaviorParams.default()
        clone = BehaviorParams.from_dict(params.to_dict())
        assert clone.to_dict() == params.to_dict()

    def test_zero_failure_deltas_equalises_regimes(self):
        params = BehaviorParams.default().zero_failure_deltas()
        assert params.failure_scan == params.baseline
        assert params.failure_stare == params.baseline

    def test_profile_file_loading(self, tmp_path):
        import json

        params = BehaviorParams.default()
        path = tmp_path / "profile.json"
        path.write_text(json.dumps(params.to_dict()))
        assert BehaviorParams.from_file(path).to_dict() == params.to_dict()

    def test_unknown_schema_rejected(self):
        with pytest.raises(InvalidParameterError):
            BehaviorParams.from_dict({"schema": 99})

    def test_traits_are_deterministic(self):
        behavior = BehaviorParams.default()
        a = draw_traits(behavior, np.random.default_rng(3))
        b = draw_traits(behavior, np.random.default_rng(3))
        assert a == b

    def test_probe_session_has_no_failure(self):
        probe = nf_probe_session(seed=2)
        assert probe.timeline.failure_window() is None
        assert [s.label for s in segment_session(probe)] == ["NF"] * 4
