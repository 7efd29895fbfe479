"""Inter-onset intervals and their shuffle-grid classification.

Consecutive onsets define intervals; against an estimated base unit (the
duration of one eighth-note triplet), each interval is a single, double, or
triple in nominal 1:2:3 ratio, or discarded when it exceeds a cutoff multiple
(missing onsets). The base unit itself is defined circularly, so a fixed-point
iteration recovers it from the data.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, replace

import numpy as np

from .errors import EstimationError, FormatError, ParameterError
from .onsets import OnsetSeries

__all__ = [
    "BeatClass",
    "Interval",
    "IntervalSeries",
    "Section",
    "SectionMap",
    "intervals",
    "estimate_base_unit",
    "classify_intervals",
    "interval_stats",
    "read_sections_csv",
    "write_sections_csv",
]

DEFAULT_MAX_MULTIPLE = 3.5


class BeatClass(enum.Enum):
    SINGLE = "single"
    DOUBLE = "double"
    TRIPLE = "triple"
    DISCARDED = "discarded"

    @property
    def multiple(self) -> int | None:
        return {"single": 1, "double": 2, "triple": 3}.get(self.value)


@dataclass(frozen=True)
class Interval:
    """One inter-onset interval.

    ``start_index`` points at the onset that opens the interval;
    ``start_time_s`` is that onset's time. ``klass`` is None until
    classification; discarded intervals have ``valid=False`` and no
    normalized duration.
    """

    tau_s: float
    start_index: int
    start_time_s: float
    klass: BeatClass | None = None
    normalized_tau_s: float | None = None
    valid: bool = True

    def __post_init__(self):
        if self.tau_s <= 0:
            raise ParameterError("interval durations must be positive")


@dataclass(frozen=True)
class IntervalSeries:
    intervals: tuple[Interval, ...]

    def __post_init__(self):
        object.__setattr__(self, "intervals", tuple(self.intervals))

    def __len__(self) -> int:
        return len(self.intervals)

    def __iter__(self):
        return iter(self.intervals)

    def __getitem__(self, i) -> Interval:
        return self.intervals[i]

    def taus(self) -> np.ndarray:
        return np.array([iv.tau_s for iv in self.intervals], dtype=np.float64)

    def valid_intervals(self) -> list[Interval]:
        return [iv for iv in self.intervals if iv.valid]

    def of_class(self, klass: BeatClass) -> list[Interval]:
        return [iv for iv in self.intervals if iv.klass is klass]

    @property
    def classified(self) -> bool:
        return all(iv.klass is not None for iv in self.intervals)


@dataclass(frozen=True)
class Section:
    start_time_s: float
    end_time_s: float
    tag: str = "other"

    def __post_init__(self):
        if self.end_time_s <= self.start_time_s:
            raise ParameterError("section end must exceed start")
        if self.tag not in ("A1-verse", "A2-prechorus", "B-chorus", "other"):
            raise ParameterError(f"unknown section tag {self.tag!r}")


@dataclass(frozen=True)
class SectionMap:
    """Ordered, non-overlapping song sections (user-supplied)."""

    sections: tuple[Section, ...]

    def __post_init__(self):
        secs = tuple(self.sections)
        for a, b in zip(secs, secs[1:]):
            if b.start_time_s < a.end_time_s:
                raise ParameterError("sections must be non-overlapping and increasing")
        object.__setattr__(self, "sections", secs)

    def __iter__(self):
        return iter(self.sections)

    def __len__(self) -> int:
        return len(self.sections)


def intervals(onsets: OnsetSeries) -> IntervalSeries:
    """Differences of consecutive onset times, unclassified."""
    if len(onsets) < 2:
        raise ParameterError("need at least 2 onsets to form intervals")
    times = onsets.times()
    taus = np.diff(times)
    return IntervalSeries(
        intervals=tuple(
            Interval(tau_s=float(t), start_index=i, start_time_s=float(times[i]))
            for i, t in enumerate(taus)
        )
    )


def _seed_from_minimum_mode(taus: np.ndarray, bin_ms: float = 4.0) -> float:
    """Center of the lowest well-populated histogram bin.

    Picks the shortest interval cluster (the singles) while ignoring stray
    short outliers that fill no bin.
    """
    bin_s = bin_ms * 1e-3
    lo = np.floor(taus.min() / bin_s) * bin_s
    n_bins = max(1, int(np.ceil((taus.max() - lo) / bin_s)) + 1)
    edges = lo + bin_s * np.arange(n_bins + 1)
    counts, _ = np.histogram(taus, bins=edges)
    floor = max(1.0, 0.5 * counts.max())
    for i, c in enumerate(counts):
        if c >= floor:
            return float(edges[i] + 0.5 * bin_s)
    return float(np.median(taus))


def estimate_base_unit(
    series: IntervalSeries,
    hint_bpm: float | None = None,
    max_multiple: float = DEFAULT_MAX_MULTIPLE,
    tol_s: float = 1e-4,
    max_iter: int = 50,
) -> float:
    """Fixed-point estimate of the eighth-note-triplet duration.

    Starting from ``60/(hint_bpm*6)`` (12 triplet units per half-time shuffle
    bar) or from the minimum-mode of the interval histogram, each interval's
    ratio to the current estimate is rounded to the nearest of {1, 2, 3}
    (ratios beyond ``max_multiple`` are ignored) and the estimate becomes the
    mean normalized duration. Stops when the update falls below 0.1 ms.
    """
    if len(series) == 0:
        raise ParameterError("cannot estimate a base unit from an empty series")
    taus = series.taus()
    if hint_bpm is not None:
        if hint_bpm <= 0:
            raise ParameterError("hint_bpm must be positive")
        base = 60.0 / (hint_bpm * 6.0)
    else:
        base = _seed_from_minimum_mode(taus)
    for _ in range(max_iter):
        ratios = taus / base
        rounded = np.clip(np.round(ratios), 1, 3)
        keep = ratios <= max_multiple
        if not np.any(keep):
            raise EstimationError("no intervals within the class cutoff; base unit undefined")
        new_base = float(np.mean(taus[keep] / rounded[keep]))
        if abs(new_base - base) < tol_s:
            return new_base
        base = new_base
    raise EstimationError(f"base-unit estimate did not converge in {max_iter} iterations")


def classify_intervals(
    series: IntervalSeries,
    base: float,
    max_multiple: float = DEFAULT_MAX_MULTIPLE,
) -> IntervalSeries:
    """Assign single/double/triple classes by nearest multiple of ``base``.

    Ratio bands: under 1.5 is a single, [1.5, 2.5) a double, [2.5,
    ``max_multiple``] a triple; anything beyond comes from missing onsets and
    is discarded (``valid=False``).
    """
    if base <= 0:
        raise ParameterError("base unit must be positive")
    out = []
    for iv in series:
        r = iv.tau_s / base
        if r > max_multiple:
            out.append(replace(iv, klass=BeatClass.DISCARDED, normalized_tau_s=None, valid=False))
            continue
        if r < 1.5:
            klass = BeatClass.SINGLE
        elif r < 2.5:
            klass = BeatClass.DOUBLE
        else:
            klass = BeatClass.TRIPLE
        out.append(
            replace(iv, klass=klass, normalized_tau_s=iv.tau_s / klass.multiple, valid=True)
        )
    return IntervalSeries(intervals=tuple(out))


def interval_stats(series: IntervalSeries, bin_width_ms: float = 2.0) -> dict:
    """Per-class counts, means, standard deviations, and histograms.

    Returns a JSON-ready dict keyed by class name plus the overall
    ``detection_rate`` (valid / raw intervals). Empty classes report only
    their zero count.
    """
    if not series.classified:
        raise ParameterError("classify the series before computing stats")
    out: dict = {}
    for klass in (BeatClass.SINGLE, BeatClass.DOUBLE, BeatClass.TRIPLE):
        taus = np.array([iv.tau_s for iv in series.of_class(klass)])
        if len(taus) == 0:
            out[klass.value] = {"count": 0}
            continue
        width = bin_width_ms * 1e-3
        lo = np.floor(taus.min() / width) * width
        n_bins = max(1, int(np.ceil((taus.max() - lo) / width)) + 1)
        edges = lo + width * np.arange(n_bins + 1)
        counts, _ = np.histogram(taus, bins=edges)
        out[klass.value] = {
            "count": int(len(taus)),
            "mean_s": float(np.mean(taus)),
            "std_s": float(np.std(taus, ddof=1)) if len(taus) > 1 else 0.0,
            "histogram": {
                "bin_edges_s": [float(e) for e in edges],
                "counts": [int(c) for c in counts],
            },
        }
    n_raw = len(series)
    n_valid = len(series.valid_intervals())
    out["discarded"] = {"count": n_raw - n_valid}
    out["detection_rate"] = n_valid / n_raw if n_raw else 0.0
    return out


# ---------------------------------------------------------------------------
# Section CSV (schema: start_s,end_s,tag)

_SECTION_HEADER = ["start_s", "end_s", "tag"]


def write_sections_csv(path, sections: SectionMap) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(_SECTION_HEADER)
        for s in sections:
            writer.writerow([f"{s.start_time_s:.6f}", f"{s.end_time_s:.6f}", s.tag])


def read_sections_csv(path) -> SectionMap:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != _SECTION_HEADER:
            raise FormatError(f"bad section header in {path!r}: {header}")
        sections = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                start, end, tag = row
                sections.append(Section(float(start), float(end), tag))
            except (ValueError, ParameterError) as exc:
                raise FormatError(f"{path!s}:{lineno}: bad section row: {exc}") from exc
    return SectionMap(sections=tuple(sections))
