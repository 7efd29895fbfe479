import json

import numpy as np
import pytest

from groovekit import GrooveSpec, gen_shuffle_onsets
from groovekit.analysis import (
    AnalysisParams,
    DegenerateInputError,
    run_analysis,
    write_analysis_outputs,
)

from conftest import series_from_times


class TestRunAnalysis:
    def test_too_few_onsets(self):
        with pytest.raises(DegenerateInputError):
            run_analysis(series_from_times([0.1, 0.25, 0.4]))

    def test_swing_note_when_undefined(self):
        # straight quarter-ish grid: all intervals the same class, no doubles
        onsets = series_from_times(np.arange(20) * 0.120)
        result = run_analysis(onsets)
        assert result.swing is None
        assert "undefined" in result.swing_note
        report = result.report_dict()
        assert report["swing"] is None
        assert "no doubles" in report["swing_note"]

    def test_short_series_dfa_skipped_with_note(self):
        spec = GrooveSpec(bpm=84.0, swing_ratio=2.0, bars=3)
        onsets, _ = gen_shuffle_onsets(spec, seed=0)
        result = run_analysis(onsets)
        # 24 onsets: 11 singles / 12 doubles are too short for DFA
        assert "intervals_singles" in result.dfa_notes
        report = result.report_dict()
        assert "skipped" in report["dfa"]["intervals_singles"]

    def test_report_fields_complete(self):
        spec = GrooveSpec(bpm=84.0, swing_ratio=1.79, bars=30, jitter_sigma_ms=2.0)
        onsets, _ = gen_shuffle_onsets(spec, seed=1)
        result = run_analysis(onsets, params=AnalysisParams(bpm_hint=84.0))
        report = result.report_dict()
        assert report["onset_count"] == 240
        assert set(report["interval_counts"]) == {"single", "double", "triple", "discarded"}
        assert report["parameters"]["bpm_hint"] == 84.0
        assert 100.0 < report["base_unit_ms"] < 140.0
        assert report["tool_version"]
        assert set(report["dfa"]["intervals_all"]["s_ranges"]) == {"alpha1", "alpha2"}
        assert report["phrase"]["interval"]["template_length"] == 16

    def test_raw_intervals_mode(self):
        spec = GrooveSpec(bpm=84.0, swing_ratio=2.0, bars=30, jitter_sigma_ms=2.0)
        onsets, _ = gen_shuffle_onsets(spec, seed=2)
        norm = run_analysis(onsets)
        raw = run_analysis(onsets, params=AnalysisParams(raw_intervals=True))
        a_norm = norm.dfa_results["intervals_all"].F
        a_raw = raw.dfa_results["intervals_all"].F
        assert not np.allclose(a_norm, a_raw)


class TestWriteOutputs:
    def test_no_temp_files_left(self, tmp_path):
        spec = GrooveSpec(bpm=84.0, swing_ratio=2.0, bars=20, jitter_sigma_ms=2.0)
        onsets, _ = gen_shuffle_onsets(spec, seed=0)
        result = run_analysis(onsets)
        report_path = write_analysis_outputs(tmp_path / "out", result)
        leftovers = list((tmp_path / "out").glob("*.tmp"))
        assert leftovers == []
        report = json.loads(report_path.read_text())
        assert report["onset_count"] == 160

    def test_dfa_csv_schema(self, tmp_path):
        spec = GrooveSpec(bpm=84.0, swing_ratio=2.0, bars=30, jitter_sigma_ms=2.0)
        onsets, _ = gen_shuffle_onsets(spec, seed=0)
        result = run_analysis(onsets)
        write_analysis_outputs(tmp_path / "out", result)
        header = (tmp_path / "out" / "dfa_intervals_all.csv").read_text().splitlines()[0]
        assert header == "s,F,alpha_local"
