"""Onset extraction and annotation handling.

Peaks of the amplitude envelope become onsets; quality control discards
uncertain ones, a merge rule collapses double-triggered hits a few
milliseconds apart, and an edit protocol applies human corrections that
arrive as CSV files.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace

import numpy as np
from scipy.signal import find_peaks

from .audio import EnvelopeSignal
from .errors import EditError, FormatError, ParameterError

__all__ = [
    "Onset",
    "OnsetSeries",
    "AnnotationEdit",
    "detect_onsets",
    "merge_close_onsets",
    "apply_edits",
    "write_onsets_csv",
    "read_onsets_csv",
    "write_edits_csv",
    "read_edits_csv",
]

LABELS = ("hihat", "snare", "ghost", "unknown")
SOURCES = ("auto", "manual-add", "manual-move")

# onsets whose peak-width uncertainty exceeds this are dropped at detection
MAX_UNCERTAINTY_MS = 5.0

# window for resolving an edit's target time against existing onsets
EDIT_RESOLUTION_S = 0.005


@dataclass(frozen=True)
class Onset:
    time_s: float
    amplitude: float
    label: str = "unknown"
    source: str = "auto"
    uncertainty_ms: float = 0.0

    def __post_init__(self):
        if self.label not in LABELS:
            raise ParameterError(f"unknown onset label {self.label!r}")
        if self.source not in SOURCES:
            raise ParameterError(f"unknown onset source {self.source!r}")
        if not 0.0 <= self.amplitude <= 1.0:
            raise ParameterError("onset amplitude must lie in [0, 1]")
        if self.uncertainty_ms < 0:
            raise ParameterError("uncertainty_ms must be non-negative")


@dataclass(frozen=True)
class OnsetSeries:
    """Strictly time-ordered onsets with amplitudes and provenance."""

    onsets: tuple[Onset, ...]

    def __post_init__(self):
        onsets = tuple(self.onsets)
        times = [o.time_s for o in onsets]
        if any(t2 <= t1 for t1, t2 in zip(times, times[1:])):
            raise ParameterError("onset times must be strictly increasing")
        object.__setattr__(self, "onsets", onsets)

    def __len__(self) -> int:
        return len(self.onsets)

    def __iter__(self):
        return iter(self.onsets)

    def __getitem__(self, i) -> Onset:
        return self.onsets[i]

    def times(self) -> np.ndarray:
        return np.array([o.time_s for o in self.onsets], dtype=np.float64)

    def amplitudes(self) -> np.ndarray:
        return np.array([o.amplitude for o in self.onsets], dtype=np.float64)

    def labels(self) -> list[str]:
        return [o.label for o in self.onsets]


@dataclass(frozen=True)
class AnnotationEdit:
    """One human correction: add, remove, move, or relabel an onset.

    ``target_time_s`` must land within 5 ms of an existing onset for
    remove/move/relabel; for add it is the new onset's time.
    """

    kind: str
    target_time_s: float
    new_time_s: float | None = None
    label: str | None = None

    def __post_init__(self):
        if self.kind not in ("add", "remove", "move", "relabel"):
            raise ParameterError(f"unknown edit kind {self.kind!r}")
        if self.kind == "move" and self.new_time_s is None:
            raise ParameterError("move edits need new_time_s")
        if self.kind == "relabel" and self.label is None:
            raise ParameterError("relabel edits need a label")


def _peak_uncertainty_ms(values: np.ndarray, peak: int, sample_rate: float) -> float:
    """Half the width of the peak above 90% of its height, in milliseconds."""
    cut = 0.9 * values[peak]
    left = peak
    while left > 0 and values[left - 1] >= cut:
        left -= 1
    right = peak
    last = len(values) - 1
    while right < last and values[right + 1] >= cut:
        right += 1
    width_samples = right - left + 1
    return 0.5 * width_samples / sample_rate * 1e3


def detect_onsets(
    env: EnvelopeSignal,
    threshold: float = 0.1,
    refractory_ms: float = 50.0,
) -> OnsetSeries:
    """Pick local envelope maxima above a threshold as onsets.

    ``threshold`` is a fraction of the envelope peak. Peaks closer than
    ``refractory_ms`` are pruned smaller-first, so the survivors respect the
    spacing exactly. Each onset carries a timing uncertainty estimated as
    half the peak's width above 90% of its height; onsets beyond 5 ms
    uncertainty are discarded. A silent envelope yields an empty series.
    """
    if not 0 < threshold < 1:
        raise ParameterError("threshold must lie in (0, 1)")
    if refractory_ms <= 0:
        raise ParameterError("refractory_ms must be positive")
    values = env.values
    if env.silent or len(values) < 3:
        return OnsetSeries(onsets=())

    height = threshold * float(np.max(values))
    distance = max(1, int(round(refractory_ms * 1e-3 * env.sample_rate)))
    peaks, _ = find_peaks(values, height=height, distance=distance)

    out = []
    for p in peaks:
        unc = _peak_uncertainty_ms(values, int(p), env.sample_rate)
        if unc > MAX_UNCERTAINTY_MS:
            continue
        out.append(
            Onset(
                time_s=p / env.sample_rate,
                amplitude=float(values[p]),
                label="unknown",
                source="auto",
                uncertainty_ms=unc,
            )
        )
    return OnsetSeries(onsets=tuple(out))


def merge_close_onsets(series: OnsetSeries, window_ms: float = 3.0) -> OnsetSeries:
    """Collapse runs of onsets with consecutive gaps under ``window_ms``.

    A run keeps its first member's time (the hit is annotated to the first
    trigger) and the maximum amplitude seen in the run.
    """
    if window_ms <= 0:
        raise ParameterError("window_ms must be positive")
    if len(series) <= 1:
        return series
    window_s = window_ms * 1e-3
    merged: list[Onset] = []
    run_first = series[0]
    run_amp = run_first.amplitude
    prev_time = run_first.time_s
    for onset in series.onsets[1:]:
        if onset.time_s - prev_time < window_s:
            run_amp = max(run_amp, onset.amplitude)
        else:
            merged.append(replace(run_first, amplitude=run_amp))
            run_first = onset
            run_amp = onset.amplitude
        prev_time = onset.time_s
    merged.append(replace(run_first, amplitude=run_amp))
    return OnsetSeries(onsets=tuple(merged))


def _resolve_target(onsets: list[Onset], target_time_s: float) -> int | None:
    best = None
    best_dist = EDIT_RESOLUTION_S
    for i, onset in enumerate(onsets):
        dist = abs(onset.time_s - target_time_s)
        if dist <= best_dist:
            if best is None or dist < best_dist:
                best, best_dist = i, dist
    return best


def _amplitude_at(env: EnvelopeSignal | None, time_s: float) -> float:
    if env is None or len(env.values) == 0:
        return 0.0
    idx = int(round(time_s * env.sample_rate))
    idx = min(max(idx, 0), len(env.values) - 1)
    return float(env.values[idx])


def apply_edits(
    series: OnsetSeries,
    edits: list[AnnotationEdit],
    env: EnvelopeSignal | None = None,
) -> OnsetSeries:
    """Apply ordered edits; the result is re-sorted.

    Added onsets read their amplitude from ``env`` when given, else 0 with
    label unknown. An edit whose target resolves to no onset within 5 ms
    raises :class:`EditError` naming the edit index.
    """
    onsets = list(series.onsets)
    for idx, edit in enumerate(edits):
        if edit.kind == "add":
            onsets.append(
                Onset(
                    time_s=edit.target_time_s,
                    amplitude=_amplitude_at(env, edit.target_time_s),
                    label=edit.label or "unknown",
                    source="manual-add",
                    uncertainty_ms=0.0,
                )
            )
            onsets.sort(key=lambda o: o.time_s)
            continue
        target = _resolve_target(onsets, edit.target_time_s)
        if target is None:
            raise EditError(
                f"edit {idx} ({edit.kind}) has no onset within 5 ms of "
                f"{edit.target_time_s:.6f} s"
            )
        if edit.kind == "remove":
            del onsets[target]
        elif edit.kind == "move":
            onsets[target] = replace(
                onsets[target], time_s=edit.new_time_s, source="manual-move"
            )
            onsets.sort(key=lambda o: o.time_s)
        elif edit.kind == "relabel":
            onsets[target] = replace(onsets[target], label=edit.label)
    return OnsetSeries(onsets=tuple(onsets))


# ---------------------------------------------------------------------------
# CSV round-trip (annotation files are the lingua franca of the pipeline)

_ONSET_HEADER = ["index", "time_s", "amplitude", "label", "source"]
_EDIT_HEADER = ["kind", "target_time_s", "new_time_s", "label"]


def write_onsets_csv(path, series: OnsetSeries) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(_ONSET_HEADER)
        for i, onset in enumerate(series):
            writer.writerow(
                [i, f"{onset.time_s:.6f}", f"{onset.amplitude:.6f}", onset.label, onset.source]
            )


def read_onsets_csv(path) -> OnsetSeries:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != _ONSET_HEADER:
            raise FormatError(f"bad annotation header in {path!r}: {header}")
        onsets = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                _, time_s, amplitude, label, source = row
                onsets.append(
                    Onset(
                        time_s=float(time_s),
                        amplitude=float(amplitude),
                        label=label,
                        source=source,
                    )
                )
            except (ValueError, ParameterError) as exc:
                raise FormatError(f"{path!s}:{lineno}: bad annotation row: {exc}") from exc
    return OnsetSeries(onsets=tuple(onsets))


def write_edits_csv(path, edits: list[AnnotationEdit]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(_EDIT_HEADER)
        for e in edits:
            writer.writerow(
                [
                    e.kind,
                    f"{e.target_time_s:.6f}",
                    "" if e.new_time_s is None else f"{e.new_time_s:.6f}",
                    e.label or "",
                ]
            )


def read_edits_csv(path) -> list[AnnotationEdit]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != _EDIT_HEADER:
            raise FormatError(f"bad edits header in {path!r}: {header}")
        edits = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                kind, target, new_time, label = row
                edits.append(
                    AnnotationEdit(
                        kind=kind,
                        target_time_s=float(target),
                        new_time_s=float(new_time) if new_time else None,
                        label=label or None,
                    )
                )
            except (ValueError, ParameterError) as exc:
                raise FormatError(f"{path!s}:{lineno}: bad edit row: {exc}") from exc
    return edits
