"""Command-line interface.

Subcommands:
  onsets   audio -> annotation CSV (detect, merge, optional edits)
  analyze  audio or annotation CSV -> report.json + CSV sidecars
  synth    groove parameters -> annotation CSV (+ optional click-track WAV),
           or a raw power-law series with --series-only

Exit codes: 0 success, 1 degenerate analysis (e.g. too few onsets),
2 usage or input errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from ._version import __version__
from .analysis import AnalysisParams, DegenerateInputError, run_analysis, write_analysis_outputs
from .audio import envelope, highpass, load_audio, save_audio
from .errors import GrooveKitError
from .intervals import read_sections_csv
from .onsets import (
    apply_edits,
    detect_onsets,
    merge_close_onsets,
    read_edits_csv,
    read_onsets_csv,
    write_onsets_csv,
)
from .synth import GrooveSpec, gen_powerlaw_noise, gen_shuffle_onsets, render_clicks
from .tempogram import TempogramParams, fourier_tempogram, novelty_curve, tempogram_summary, write_tempogram_csv

__all__ = ["main"]


def _add_detection_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--cutoff-hz", type=float, default=1000.0,
                        help="high-pass cutoff (default 1000)")
    parser.add_argument("--threshold", type=float, default=0.1,
                        help="peak threshold as fraction of envelope peak (default 0.1)")
    parser.add_argument("--refractory-ms", type=float, default=50.0,
                        help="minimum onset separation (default 50)")
    parser.add_argument("--merge-ms", type=float, default=3.0,
                        help="double-trigger merge window (default 3)")
    parser.add_argument("--smoothing-ms", type=float, default=2.0,
                        help="envelope smoothing time constant (default 2)")


def _detect_from_audio(path: str, args) -> tuple:
    clip = load_audio(path)
    filtered = highpass(clip, cutoff_hz=args.cutoff_hz)
    env = envelope(filtered, smoothing_ms=args.smoothing_ms)
    series = detect_onsets(env, threshold=args.threshold, refractory_ms=args.refractory_ms)
    series = merge_close_onsets(series, window_ms=args.merge_ms)
    return series, env


def _cmd_onsets(args) -> int:
    series, env = _detect_from_audio(args.audio, args)
    if args.edits:
        series = apply_edits(series, read_edits_csv(args.edits), env=env)
    write_onsets_csv(args.output, series)
    print(f"wrote {len(series)} onsets to {args.output}")
    return 0


def _parse_range(text: str) -> tuple[int, int]:
    try:
        lo, hi = text.split(":")
        return int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}")


def _cmd_analyze(args) -> int:
    in_path = Path(args.input)
    clip = None
    if in_path.suffix.lower() == ".csv":
        series = read_onsets_csv(in_path)
    else:
        clip = load_audio(args.input)
        filtered = highpass(clip, cutoff_hz=args.cutoff_hz)
        env = envelope(filtered, smoothing_ms=args.smoothing_ms)
        series = detect_onsets(env, threshold=args.threshold,
                               refractory_ms=args.refractory_ms)
        series = merge_close_onsets(series, window_ms=args.merge_ms)
    sections = read_sections_csv(args.sections) if args.sections else None
    params = AnalysisParams(
        bpm_hint=args.bpm_hint,
        max_multiple=args.max_multiple,
        phrase_positions=args.phrase_len,
        dfa_short=args.dfa_short,
        dfa_long=args.dfa_long,
        raw_intervals=args.raw_intervals,
    )
    result = run_analysis(
        series, params=params, sections=sections, input_descriptor=str(args.input)
    )
    report_path = write_analysis_outputs(args.out_dir, result)
    if clip is not None:
        _write_tempogram_outputs(Path(args.out_dir), clip)
    print(f"wrote {report_path}")
    return 0


def _write_tempogram_outputs(out_dir: Path, clip) -> None:
    """Tempogram sidecars for audio inputs; skipped when the clip is shorter
    than one tempogram window."""
    nov = novelty_curve(clip)
    params = TempogramParams()
    if len(nov) < params.window_length:
        print("clip shorter than one tempogram window; skipping tempogram outputs")
        return
    tg = fourier_tempogram(nov, params)
    write_tempogram_csv(out_dir / "tempogram.csv", tg)
    (out_dir / "tempogram.json").write_text(
        json.dumps(tempogram_summary(tg), indent=2) + "\n", encoding="utf-8"
    )


def _cmd_synth(args) -> int:
    if args.series_only:
        rows = gen_powerlaw_noise(args.beta, args.length, seed=args.seed)
        with open(args.output, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["value"])
            for v in rows:
                writer.writerow([f"{v:.12g}"])
        print(f"wrote {len(rows)} samples to {args.output}")
        return 0
    profile = None
    if args.ramp_bpm is not None:
        profile = ((0.0, args.bpm), (float(args.bars), args.ramp_bpm))
    spec = GrooveSpec(
        bpm=args.bpm,
        swing_ratio=args.swing,
        bars=args.bars,
        jitter_sigma_ms=args.jitter_ms,
        lrc_beta=args.lrc_beta,
        lrc_sigma_ms=args.lrc_sigma_ms,
        ghost_probability=args.ghost_prob,
        amplitude_jitter=args.amplitude_jitter,
        drift_profile=profile,
    )
    series, _ = gen_shuffle_onsets(spec, seed=args.seed)
    write_onsets_csv(args.output, series)
    print(f"wrote {len(series)} onsets to {args.output}")
    if args.render:
        clip = render_clicks(
            series,
            sample_rate=args.sample_rate,
            click_ms=args.click_ms,
            noise_db=args.noise_db,
            seed=args.seed,
        )
        save_audio(args.render, clip)
        print(f"rendered {clip.duration_s:.2f} s of audio to {args.render}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="groovekit",
        description="Drum groove quantification: onsets, shuffle grid, swing, drift, DFA.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_onsets = sub.add_parser("onsets", help="detect onsets in an audio file")
    p_onsets.add_argument("audio", help="input PCM WAV file")
    p_onsets.add_argument("-o", "--output", required=True, help="annotation CSV to write")
    p_onsets.add_argument("--edits", help="edits CSV to apply after detection")
    _add_detection_flags(p_onsets)
    p_onsets.set_defaults(func=_cmd_onsets)

    p_an = sub.add_parser("analyze", help="run the full analysis pipeline")
    p_an.add_argument("input", help="audio file or annotation CSV")
    p_an.add_argument("--out-dir", default="groovekit-out", help="output directory")
    p_an.add_argument("--bpm-hint", type=float, default=None)
    p_an.add_argument("--max-multiple", type=float, default=3.5,
                      help="discard intervals beyond this multiple of the base unit")
    p_an.add_argument("--phrase-len", type=int, default=16,
                      help="hi-hat positions per two-bar phrase (default 16)")
    p_an.add_argument("--dfa-short", type=_parse_range, default=(4, 16), metavar="LO:HI")
    p_an.add_argument("--dfa-long", type=_parse_range, default=(16, 100), metavar="LO:HI")
    p_an.add_argument("--raw-intervals", action="store_true",
                      help="run DFA on raw rather than class-normalized intervals")
    p_an.add_argument("--sections", help="section CSV (start_s,end_s,tag)")
    _add_detection_flags(p_an)
    p_an.set_defaults(func=_cmd_analyze)

    p_sy = sub.add_parser("synth", help="generate ground-truth grooves or noise series")
    p_sy.add_argument("-o", "--output", required=True, help="annotation or series CSV to write")
    p_sy.add_argument("--bpm", type=float, default=84.0)
    p_sy.add_argument("--swing", type=float, default=2.0)
    p_sy.add_argument("--bars", type=int, default=4)
    p_sy.add_argument("--jitter-ms", type=float, default=0.0)
    p_sy.add_argument("--lrc-beta", type=float, default=0.0)
    p_sy.add_argument("--lrc-sigma-ms", type=float, default=0.0)
    p_sy.add_argument("--ghost-prob", type=float, default=0.0)
    p_sy.add_argument("--amplitude-jitter", type=float, default=0.0)
    p_sy.add_argument("--ramp-bpm", type=float, default=None,
                      help="linear tempo ramp target over the full length")
    p_sy.add_argument("--seed", type=int, default=0)
    p_sy.add_argument("--render", help="also render a click-track WAV here")
    p_sy.add_argument("--sample-rate", type=float, default=44100.0)
    p_sy.add_argument("--click-ms", type=float, default=3.0)
    p_sy.add_argument("--noise-db", type=float, default=None,
                      help="broadband noise level relative to click peak")
    p_sy.add_argument("--series-only", action="store_true",
                      help="emit a power-law noise series instead of a groove")
    p_sy.add_argument("--beta", type=float, default=1.0, help="series spectral exponent")
    p_sy.add_argument("-n", "--length", type=int, default=8192, help="series length")
    p_sy.set_defaults(func=_cmd_synth)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DegenerateInputError as exc:
        print(f"groovekit: {exc}", file=sys.stderr)
        return 1
    except (GrooveKitError, OSError) as exc:
        print(f"groovekit: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
