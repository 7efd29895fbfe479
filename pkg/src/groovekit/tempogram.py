"""Novelty curve and Fourier tempogram.

The novelty curve is log-compressed spectral flux: short-time spectra,
logarithmic compression, half-wave-rectified frame differences summed over
frequency. The tempogram evaluates windowed Fourier magnitudes of the novelty
at tempo-rate frequencies, yielding a time-by-tempo map whose per-frame
argmax (with a soft preference for tempi near a reference) tracks the tempo.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .audio import AudioClip
from .errors import ParameterError

__all__ = [
    "NoveltyCurve",
    "TempogramParams",
    "Tempogram",
    "novelty_curve",
    "fourier_tempogram",
    "cyclic_fold",
    "argmax_track",
    "tempogram_summary",
    "write_tempogram_csv",
]


@dataclass(frozen=True)
class NoveltyCurve:
    values: np.ndarray
    sample_rate: float  # frames per second
    start_s: float = 0.0  # time of the first frame (window center)

    def __len__(self) -> int:
        return len(self.values)

    def times_s(self) -> np.ndarray:
        return self.start_s + np.arange(len(self.values)) / self.sample_rate


@dataclass(frozen=True)
class TempogramParams:
    window_length: int = 1024   # novelty frames per tempogram window
    hop: int = 64               # novelty frames between tempogram frames
    fft_length: int = 4096
    min_bpm: float = 30.0
    max_bpm: float = 360.0
    ref_bpm: float = 84.0

    def __post_init__(self):
        if self.window_length < 2 or self.hop < 1:
            raise ParameterError("window_length must be >= 2 and hop >= 1")
        if self.fft_length < self.window_length:
            raise ParameterError("fft_length must cover the window")
        if not 0 < self.min_bpm < self.max_bpm:
            raise ParameterError("need 0 < min_bpm < max_bpm")


@dataclass(frozen=True)
class Tempogram:
    times_s: np.ndarray
    tempi_bpm: np.ndarray
    magnitude: np.ndarray  # [time, tempo], non-negative
    params: TempogramParams

    def __post_init__(self):
        if self.magnitude.shape != (len(self.times_s), len(self.tempi_bpm)):
            raise ParameterError("magnitude shape must match the time and tempo axes")


def novelty_curve(
    clip: AudioClip,
    window: int = 1024,
    hop: int = 512,
    compression: float = 1000.0,
    min_db: float = -74.0,
) -> NoveltyCurve:
    """Log-compressed spectral flux of the clip.

    Frame magnitudes are floored at ``min_db`` (relative to full scale),
    compressed as log(1 + compression * |X|), differenced along time,
    half-wave rectified, and summed over bins. The first frame's novelty
    is zero by definition.
    """
    if window < 2 or hop < 1:
        raise ParameterError("window must be >= 2 and hop >= 1")
    x = clip.samples
    frame_rate = clip.sample_rate / hop
    start_s = window / 2.0 / clip.sample_rate
    if len(x) < window:
        return NoveltyCurve(values=np.zeros(0), sample_rate=frame_rate, start_s=start_s)
    n_frames = 1 + (len(x) - window) // hop
    win = np.hanning(window)
    idx = np.arange(window)[None, :] + hop * np.arange(n_frames)[:, None]
    frames = x[idx] * win
    mags = np.abs(np.fft.rfft(frames, axis=1))
    floor = 10.0 ** (min_db / 20.0)
    compressed = np.log1p(compression * np.maximum(mags, floor))
    flux = np.diff(compressed, axis=0)
    novelty = np.sum(np.maximum(flux, 0.0), axis=1)
    novelty = np.concatenate(([0.0], novelty))
    return NoveltyCurve(values=novelty, sample_rate=frame_rate, start_s=start_s)


def fourier_tempogram(novelty: NoveltyCurve, params: TempogramParams | None = None) -> Tempogram:
    """Windowed Fourier magnitude of the novelty at tempo frequencies.

    Tempo bins are the FFT bins whose frequency, expressed in BPM, falls
    inside [min_bpm, max_bpm]. Frames are complete windows only.
    """
    params = params or TempogramParams()
    values = novelty.values
    if len(values) < params.window_length:
        raise ParameterError(
            f"novelty of {len(values)} frames is shorter than the "
            f"{params.window_length}-frame tempogram window"
        )
    n_frames = 1 + (len(values) - params.window_length) // params.hop
    win = np.hanning(params.window_length)
    idx = (
        np.arange(params.window_length)[None, :]
        + params.hop * np.arange(n_frames)[:, None]
    )
    frames = values[idx] * win
    spectra = np.abs(np.fft.rfft(frames, n=params.fft_length, axis=1))
    freqs = np.fft.rfftfreq(params.fft_length, d=1.0 / novelty.sample_rate)
    bpm = freqs * 60.0
    keep = (bpm >= params.min_bpm) & (bpm <= params.max_bpm)
    times = (
        novelty.start_s
        + (params.hop * np.arange(n_frames) + params.window_length / 2.0) / novelty.sample_rate
    )
    return Tempogram(
        times_s=times,
        tempi_bpm=bpm[keep],
        magnitude=spectra[:, keep],
        params=params,
    )


def cyclic_fold(tg: Tempogram, ref_bpm: float | None = None, octave_divider: int = 60) -> Tempogram:
    """Fold tempo octaves onto [ref_bpm, 2*ref_bpm).

    The cyclic axis has ``octave_divider`` logarithmic classes; each class
    sums the interpolated magnitude at every octave of its tempo that lies
    inside the analyzed range.
    """
    if octave_divider < 1:
        raise ParameterError("octave_divider must be positive")
    ref = ref_bpm if ref_bpm is not None else tg.params.ref_bpm
    classes = ref * 2.0 ** (np.arange(octave_divider) / octave_divider)
    folded = np.zeros((len(tg.times_s), octave_divider))
    lo, hi = tg.tempi_bpm[0], tg.tempi_bpm[-1]
    for shift in range(-8, 9):
        sampled = classes * 2.0**shift
        inside = (sampled >= lo) & (sampled <= hi)
        if not np.any(inside):
            continue
        for fi in range(len(tg.times_s)):
            folded[fi, inside] += np.interp(sampled[inside], tg.tempi_bpm, tg.magnitude[fi])
    return Tempogram(
        times_s=tg.times_s,
        tempi_bpm=classes,
        magnitude=folded,
        params=tg.params,
    )


def argmax_track(tg: Tempogram, ref_bpm: float | None = None, octave_sigma: float = 1.0) -> np.ndarray:
    """Per-frame tempo of maximal magnitude, in BPM.

    With a reference tempo, magnitudes are weighted by a log-normal bell
    centered there (width ``octave_sigma`` octaves) so the metrical level
    nearest the reference wins over its octave partners. Frames with no
    energy report 0.
    """
    ref = ref_bpm if ref_bpm is not None else tg.params.ref_bpm
    mag = tg.magnitude
    if ref and ref > 0:
        with np.errstate(divide="ignore"):
            logs = np.log2(np.maximum(tg.tempi_bpm, 1e-12) / ref)
        mag = mag * np.exp(-0.5 * (logs / octave_sigma) ** 2)[None, :]
    track = tg.tempi_bpm[np.argmax(mag, axis=1)]
    silent = np.max(tg.magnitude, axis=1) <= 0.0
    track = track.copy()
    track[silent] = 0.0
    return track


def write_tempogram_csv(path, tg: Tempogram) -> None:
    """Long-form CSV: time_s,bpm,magnitude."""
    import csv

    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["time_s", "bpm", "magnitude"])
        for fi, t in enumerate(tg.times_s):
            for bi, bpm in enumerate(tg.tempi_bpm):
                writer.writerow([f"{t:.6f}", f"{bpm:.4f}", f"{tg.magnitude[fi, bi]:.9g}"])


def tempogram_summary(tg: Tempogram) -> dict:
    """JSON-ready summary: parameters plus the per-frame argmax tempo track."""
    track = argmax_track(tg)
    return {
        "params": {
            "window_length": tg.params.window_length,
            "hop": tg.params.hop,
            "fft_length": tg.params.fft_length,
            "min_bpm": tg.params.min_bpm,
            "max_bpm": tg.params.max_bpm,
            "ref_bpm": tg.params.ref_bpm,
        },
        "track": [
            {"time_s": float(t), "bpm": float(b)} for t, b in zip(tg.times_s, track)
        ],
    }
