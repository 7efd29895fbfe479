"""Groove metrics: tempo drift, swing ratio, and two-bar phrase profiles.

Drift compares performed time against an imaginary metronome whose tick is
the base unit. Swing is the mean double over the mean inter-triplet single.
Phrase profiles aggregate timing and dynamics per position of a repeating
two-bar template, aligned by walking the classified interval sequence in
musical units.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import EstimationError, ParameterError
from .intervals import BeatClass, IntervalSeries, SectionMap
from .onsets import OnsetSeries

__all__ = [
    "DriftPoint",
    "DriftSeries",
    "SwingReport",
    "PhraseTemplate",
    "PhraseProfile",
    "compute_drift",
    "swing_ratio",
    "phrase_interval_profile",
    "phrase_amplitude_profile",
    "write_drift_csv",
    "write_profile_csv",
]


@dataclass(frozen=True)
class DriftPoint:
    index: int          # interval count
    time_s: float       # time of the onset closing the interval
    d_s: float          # cumulative deviation from the metronome grid
    gap: bool = False   # True where a discarded interval reset the drift


@dataclass(frozen=True)
class DriftSeries:
    points: tuple[DriftPoint, ...]
    base_s: float

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def drift_values(self) -> np.ndarray:
        return np.array([p.d_s for p in self.points], dtype=np.float64)

    @property
    def gap_count(self) -> int:
        return sum(1 for p in self.points if p.gap)


@dataclass(frozen=True)
class SwingReport:
    swing_ratio: float
    mean_inter_triplet_single_s: float
    mean_double_s: float
    ratio_triad: tuple[float, float, float | None]
    n_singles_used: int
    n_doubles_used: int


@dataclass(frozen=True)
class PhraseTemplate:
    """Hi-hat slot layout of one phrase, in integer metric units.

    The default is the two-bar shuffle: 8 groups of 3 units with hits on the
    first and third note of each group, so 16 slots over 24 units. The
    expected class multiple at each slot is the unit gap to the next slot.
    """

    slot_units: tuple[int, ...] = tuple(
        u for k in range(8) for u in (3 * k, 3 * k + 2)
    )
    units_per_phrase: int = 24

    def __post_init__(self):
        slots = tuple(self.slot_units)
        if len(slots) < 2 or any(b <= a for a, b in zip(slots, slots[1:])):
            raise ParameterError("slot_units must be strictly increasing, length >= 2")
        if slots[-1] >= self.units_per_phrase:
            raise ParameterError("slots must fit inside the phrase")
        object.__setattr__(self, "slot_units", slots)

    def __len__(self) -> int:
        return len(self.slot_units)

    def slot_of_unit(self, unit: int) -> int | None:
        try:
            return self.slot_units.index(unit)
        except ValueError:
            return None

    def slot_multiple(self, slot: int) -> int:
        """Unit span from this slot to the next (wrapping into the next phrase)."""
        if slot + 1 < len(self.slot_units):
            return self.slot_units[slot + 1] - self.slot_units[slot]
        return self.units_per_phrase + self.slot_units[0] - self.slot_units[-1]

    @classmethod
    def shuffle(cls, positions: int = 16) -> "PhraseTemplate":
        """Shuffle template with ``positions`` hi-hat slots (two per group of 3 units)."""
        if positions < 2 or positions % 2:
            raise ParameterError("shuffle template needs an even position count >= 2")
        groups = positions // 2
        return cls(
            slot_units=tuple(u for k in range(groups) for u in (3 * k, 3 * k + 2)),
            units_per_phrase=3 * groups,
        )


@dataclass(frozen=True)
class PhraseProfile:
    """Per-slot statistics over phrases: mean, std, count, and (for interval
    profiles) percent deviation of the normalized interval from the
    phrase-local base unit."""

    kind: str  # "interval" or "amplitude"
    template: PhraseTemplate
    mean: tuple[float | None, ...]
    std: tuple[float | None, ...]
    n: tuple[int, ...]
    deviation_pct: tuple[float | None, ...] = field(default=())
    n_phrases: int = 0

    @property
    def template_length(self) -> int:
        return len(self.template)


def compute_drift(series: IntervalSeries, base: float) -> DriftSeries:
    """Cumulative deviation of normalized intervals from the metronome tick.

    Each valid interval advances the drift by ``tau/multiple - base``;
    a discarded interval emits a gap point with the drift reset to zero.
    """
    if base <= 0:
        raise ParameterError("base unit must be positive")
    if not series.classified:
        raise ParameterError("classify the series before computing drift")
    points: list[DriftPoint] = []
    d = 0.0
    for i, iv in enumerate(series):
        end_time = iv.start_time_s + iv.tau_s
        if not iv.valid:
            d = 0.0
            points.append(DriftPoint(index=i + 1, time_s=end_time, d_s=0.0, gap=True))
            continue
        d += iv.normalized_tau_s - base
        points.append(DriftPoint(index=i + 1, time_s=end_time, d_s=d, gap=False))
    return DriftSeries(points=tuple(points), base_s=base)


def _is_inter_triplet_single(iv, onsets: OnsetSeries) -> bool:
    """A single not bordered by a ghost note (ghosts split doubles in two)."""
    a = onsets[iv.start_index]
    b = onsets[iv.start_index + 1]
    return a.label != "ghost" and b.label != "ghost"


def swing_ratio(series: IntervalSeries, onsets: OnsetSeries) -> SwingReport:
    """Mean double over mean inter-triplet single, plus the 1 : d/s : t/s triad.

    Singles adjacent to a ghost-labeled onset are intra-triplet halves of a
    double and are excluded.
    """
    if not series.classified:
        raise ParameterError("classify the series before computing swing")
    singles = [
        iv.tau_s
        for iv in series.of_class(BeatClass.SINGLE)
        if _is_inter_triplet_single(iv, onsets)
    ]
    doubles = [iv.tau_s for iv in series.of_class(BeatClass.DOUBLE)]
    if not singles:
        raise EstimationError("swing ratio undefined: no inter-triplet singles")
    if not doubles:
        raise EstimationError("swing ratio undefined: no doubles")
    triples = [iv.tau_s for iv in series.of_class(BeatClass.TRIPLE)]
    mean_single = float(np.mean(singles))
    mean_double = float(np.mean(doubles))
    triple_term = float(np.mean(triples)) / mean_single if triples else None
    return SwingReport(
        swing_ratio=mean_double / mean_single,
        mean_inter_triplet_single_s=mean_single,
        mean_double_s=mean_double,
        ratio_triad=(1.0, mean_double / mean_single, triple_term),
        n_singles_used=len(singles),
        n_doubles_used=len(doubles),
    )


def _anchor_indices(onsets: OnsetSeries, sections: SectionMap | None) -> list[int]:
    """First onset at or after each section start; the first onset otherwise."""
    if sections is None or len(sections) == 0:
        return [0] if len(onsets) else []
    times = onsets.times()
    anchors = []
    for sec in sections:
        idx = int(np.searchsorted(times, sec.start_time_s, side="left"))
        if idx < len(times) and times[idx] < sec.end_time_s:
            anchors.append(idx)
    return sorted(set(anchors))


def _walk_units(
    series: IntervalSeries,
    onsets: OnsetSeries,
    sections: SectionMap | None,
) -> dict[int, tuple[int, int]]:
    """Map onset index -> (anchor ordinal, metric unit position).

    Each anchor restarts the unit counter at zero; a discarded interval loses
    the grid until the next anchor.
    """
    anchors = _anchor_indices(onsets, sections)
    next_of: dict[int, int] = {iv.start_index: i for i, iv in enumerate(series)}
    units: dict[int, tuple[int, int]] = {}
    for k, anchor in enumerate(anchors):
        stop = anchors[k + 1] if k + 1 < len(anchors) else len(onsets)
        u = 0
        units[anchor] = (k, 0)
        i = anchor
        while i + 1 < stop:
            iv_idx = next_of.get(i)
            if iv_idx is None:
                break
            iv = series[iv_idx]
            if not iv.valid:
                break
            u += iv.klass.multiple
            units[i + 1] = (k, u)
            i += 1
    return units


def _phrase_rows(
    series: IntervalSeries,
    onsets: OnsetSeries,
    template: PhraseTemplate,
    sections: SectionMap | None,
):
    """Yield (phrase_key, slot -> onset_index, closing onset index) for every
    phrase seen; the closer is slot 0 of the key's following phrase."""
    units = _walk_units(series, onsets, sections)
    phrases: dict[tuple[int, int], dict[int, int]] = {}
    closers: dict[tuple[int, int], int] = {}
    for onset_idx, (anchor, u) in units.items():
        phrase_no, unit_in_phrase = divmod(u, template.units_per_phrase)
        slot = template.slot_of_unit(unit_in_phrase)
        if slot is None:
            continue
        key = (anchor, phrase_no)
        phrases.setdefault(key, {})[slot] = onset_idx
        if slot == 0 and phrase_no > 0:
            closers[(anchor, phrase_no - 1)] = onset_idx
    for key in sorted(phrases):
        yield key, phrases[key], closers.get(key)


def phrase_interval_profile(
    series: IntervalSeries,
    onsets: OnsetSeries,
    template: PhraseTemplate | None = None,
    sections: SectionMap | None = None,
) -> PhraseProfile:
    """Per-slot interval statistics over complete phrases.

    A phrase is complete when every slot has an onset and the next phrase's
    opening onset exists (it closes the final interval). Slot intervals run
    slot-to-slot, so detected ghost notes in between do not fragment them.
    Deviations compare each slot's normalized interval to the phrase-local
    base unit (phrase duration over units per phrase), in percent.
    """
    template = template or PhraseTemplate()
    n_slots = len(template)
    per_slot: list[list[float]] = [[] for _ in range(n_slots)]
    per_slot_dev: list[list[float]] = [[] for _ in range(n_slots)]
    times = onsets.times()
    n_phrases = 0
    for _, slots, closer in _phrase_rows(series, onsets, template, sections):
        if closer is None or len(slots) != n_slots:
            continue
        n_phrases += 1
        slot_times = [times[slots[s]] for s in range(n_slots)]
        slot_times.append(times[closer])
        phrase_base = (slot_times[-1] - slot_times[0]) / template.units_per_phrase
        for s in range(n_slots):
            tau = slot_times[s + 1] - slot_times[s]
            normalized = tau / template.slot_multiple(s)
            per_slot[s].append(tau)
            per_slot_dev[s].append(100.0 * (normalized - phrase_base) / phrase_base)
    mean, std, n, dev = [], [], [], []
    for s in range(n_slots):
        vals = per_slot[s]
        n.append(len(vals))
        if vals:
            mean.append(float(np.mean(vals)))
            std.append(float(np.std(vals, ddof=1)) if len(vals) > 1 else 0.0)
            dev.append(float(np.mean(per_slot_dev[s])))
        else:
            mean.append(None)
            std.append(None)
            dev.append(None)
    return PhraseProfile(
        kind="interval",
        template=template,
        mean=tuple(mean),
        std=tuple(std),
        n=tuple(n),
        deviation_pct=tuple(dev),
        n_phrases=n_phrases,
    )


def phrase_amplitude_profile(
    series: IntervalSeries,
    onsets: OnsetSeries,
    template: PhraseTemplate | None = None,
    sections: SectionMap | None = None,
) -> PhraseProfile:
    """Per-slot amplitude statistics over all phrases, complete or not."""
    template = template or PhraseTemplate()
    n_slots = len(template)
    per_slot: list[list[float]] = [[] for _ in range(n_slots)]
    amps = onsets.amplitudes()
    n_phrases = 0
    for _, slots, _ in _phrase_rows(series, onsets, template, sections):
        n_phrases += 1
        for slot, onset_idx in slots.items():
            per_slot[slot].append(float(amps[onset_idx]))
    mean, std, n = [], [], []
    for s in range(n_slots):
        vals = per_slot[s]
        n.append(len(vals))
        if vals:
            mean.append(float(np.mean(vals)))
            std.append(float(np.std(vals, ddof=1)) if len(vals) > 1 else 0.0)
        else:
            mean.append(None)
            std.append(None)
    return PhraseProfile(
        kind="amplitude",
        template=template,
        mean=tuple(mean),
        std=tuple(std),
        n=tuple(n),
        deviation_pct=tuple([None] * n_slots),
        n_phrases=n_phrases,
    )


# ---------------------------------------------------------------------------
# CSV sidecars

def write_drift_csv(path, drift: DriftSeries) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "time_s", "drift_s", "gap"])
        for p in drift:
            writer.writerow([p.index, f"{p.time_s:.6f}", f"{p.d_s:.9f}", int(p.gap)])


def write_profile_csv(path, profile: PhraseProfile) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["position", "mean", "std", "n", "deviation_pct"])
        for s in range(len(profile.template)):
            mean = profile.mean[s]
            std = profile.std[s]
            dev = profile.deviation_pct[s] if profile.deviation_pct else None
            writer.writerow(
                [
                    s,
                    "" if mean is None else f"{mean:.9f}",
                    "" if std is None else f"{std:.9f}",
                    profile.n[s],
                    "" if dev is None else f"{dev:.6f}",
                ]
            )
