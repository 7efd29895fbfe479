"""Audio loading, pre-filtering, and amplitude-envelope extraction.

The front end of the pipeline: read a PCM file, high-pass it so low drums
and rumble do not smear hi-hat attacks, then rectify and smooth into the
envelope that peak picking consumes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal
from scipy.io import wavfile

from .errors import FormatError, ParameterError

__all__ = ["AudioClip", "EnvelopeSignal", "load_audio", "save_audio", "highpass", "envelope"]


@dataclass(frozen=True)
class AudioClip:
    """Mono audio at full scale 1.0.

    Multi-channel inputs are downmixed at load time; ``channel_count_original``
    records what the file held.
    """

    samples: np.ndarray
    sample_rate: float
    channel_count_original: int = 1

    def __post_init__(self):
        if self.sample_rate <= 0:
            raise ParameterError("sample_rate must be positive")
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise ParameterError("AudioClip holds mono data; downmix before constructing")
        if not np.all(np.isfinite(samples)):
            raise ParameterError("samples must be finite")
        object.__setattr__(self, "samples", samples)

    @property
    def duration_s(self) -> float:
        return len(self.samples) / self.sample_rate


@dataclass(frozen=True)
class EnvelopeSignal:
    """Non-negative envelope normalized to peak 1.0 (unless silent).

    ``source_max`` keeps the pre-normalization peak so absolute units can be
    recovered; ``silent`` marks an all-zero input that was left unnormalized.
    """

    values: np.ndarray
    sample_rate: float
    source_max: float
    silent: bool = False

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if np.any(values < 0):
            raise ParameterError("envelope values must be non-negative")
        object.__setattr__(self, "values", values)

    @property
    def times_s(self) -> np.ndarray:
        return np.arange(len(self.values)) / self.sample_rate


# scipy.io.wavfile dtypes and their full-scale divisors
_PCM_SCALES = {
    np.dtype(np.int16): 32768.0,
    np.dtype(np.int32): 2147483648.0,  # 24-bit PCM arrives left-justified in int32
    np.dtype(np.float32): 1.0,
    np.dtype(np.float64): 1.0,
}


def load_audio(path) -> AudioClip:
    """Load a PCM WAV file as a mono, [-1, 1]-scaled clip.

    Supports 16/24-bit integer and 32-bit float samples, 1-2 channels.
    Multi-channel content is downmixed by per-sample arithmetic mean.

    Raises
    ------
    OSError
        If the file does not exist or cannot be read.
    FormatError
        If the container or sample encoding is unsupported.
    """
    try:
        rate, data = wavfile.read(path)
    except OSError:
        raise
    except ValueError as exc:
        raise FormatError(f"unsupported or malformed audio file {path!r}: {exc}") from exc

    if data.dtype not in _PCM_SCALES:
        raise FormatError(f"unsupported sample encoding {data.dtype.name!r} in {path!r}")

    samples = data.astype(np.float64) / _PCM_SCALES[data.dtype]
    if samples.ndim == 1:
        channels = 1
    else:
        channels = samples.shape[1]
        samples = samples.mean(axis=1)
    return AudioClip(samples=samples, sample_rate=float(rate), channel_count_original=channels)


def save_audio(path, clip: AudioClip) -> None:
    """Write a clip as 32-bit float PCM WAV."""
    wavfile.write(path, int(round(clip.sample_rate)), clip.samples.astype(np.float32))


def highpass(clip: AudioClip, cutoff_hz: float = 1000.0, order: int = 4) -> AudioClip:
    """Zero-phase Butterworth high-pass.

    The filter runs forward and backward (``sosfiltfilt``) so onset timings
    are not skewed by phase delay; effective magnitude response is the square
    of a single pass. Output length equals input length.
    """
    nyquist = clip.sample_rate / 2.0
    if not 0 < cutoff_hz < nyquist:
        raise ParameterError(
            f"cutoff_hz must be in (0, {nyquist:g}) for sample rate {clip.sample_rate:g}"
        )
    sos = signal.butter(order, cutoff_hz, btype="highpass", fs=clip.sample_rate, output="sos")
    filtered = signal.sosfiltfilt(sos, clip.samples)
    return AudioClip(
        samples=filtered,
        sample_rate=clip.sample_rate,
        channel_count_original=clip.channel_count_original,
    )


def envelope(clip: AudioClip, smoothing_ms: float = 2.0) -> EnvelopeSignal:
    """Full-wave rectified, first-order low-pass smoothed amplitude envelope.

    ``smoothing_ms`` is the time constant of the one-pole smoother. The result
    is normalized to peak 1.0; an all-zero input yields an all-zero envelope
    flagged ``silent`` instead.
    """
    if smoothing_ms <= 0:
        raise ParameterError("smoothing_ms must be positive")
    rectified = np.abs(clip.samples)
    # one-pole low-pass: y[n] = a*y[n-1] + (1-a)*x[n]
    a = np.exp(-1.0 / (smoothing_ms * 1e-3 * clip.sample_rate))
    smoothed = signal.lfilter([1.0 - a], [1.0, -a], rectified)
    peak = float(np.max(smoothed)) if len(smoothed) else 0.0
    if peak <= 0.0:
        return EnvelopeSignal(
            values=np.zeros_like(rectified),
            sample_rate=clip.sample_rate,
            source_max=0.0,
            silent=True,
        )
    return EnvelopeSignal(
        values=smoothed / peak,
        sample_rate=clip.sample_rate,
        source_max=peak,
        silent=False,
    )
