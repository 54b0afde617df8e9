"""Command-line front end.

Subcommands bind the library into batch workflows: classify a corpus, score
one level pair, fit the score mapping, synthesize noise, render self-feedback
speech, or compute a single intelligibility score. Exit codes: 0 success,
2 validation failure (arguments, config, manifest), 1 runtime error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path

import numpy as np

from .audio import read_wav, write_wav
from .classifier import classify_ladder, evaluate_pair, render_report
from .config import CONFIG_SCHEMA_VERSION, PipelineConfig
from .errors import ConfigError, LombardkitError, ManifestError
from .feedback import FeedbackParams, apply_self_feedback
from .manifest import CorpusManifest, validate_manifest
from .mapping import fit_mapping, load_observations
from .noise import NoiseSpec, SpectrumEnvelope, assemble_babble, generate_ssn
from .stoi import stoi

log = logging.getLogger("lombardkit")


def _package_version() -> str:
    try:
        return version("lombardkit")
    except PackageNotFoundError:
        return "0.0.0+local"


def _load_config(args) -> PipelineConfig:
    if getattr(args, "config", None):
        return PipelineConfig.from_json(args.config)
    return PipelineConfig()


def _load_manifest(path) -> CorpusManifest:
    path = Path(path)
    if path.suffix.lower() == ".json":
        return CorpusManifest.from_json(path)
    return CorpusManifest.from_csv(path)


def _report_format(out_path: str | None, explicit: str | None) -> str:
    if explicit:
        return explicit
    if out_path:
        ext = Path(out_path).suffix.lower()
        return {".txt": "text", ".csv": "csv", ".json": "json"}.get(ext, "text")
    return "text"


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_classify(args) -> int:
    cfg = _load_config(args)
    manifest = _load_manifest(args.manifest)
    report = validate_manifest(manifest, check_audio=not args.skip_audio_check)
    if not report.ok:
        print(str(report), file=sys.stderr)
        return 2
    seed = args.seed if args.seed is not None else cfg.seeds[0]
    result = classify_ladder(manifest, args.noise, cfg, seed=seed, jobs=args.jobs)
    _emit(render_report(result, _report_format(args.out, args.format)), args.out)
    return 0


def _cmd_evaluate_pair(args) -> int:
    cfg = _load_config(args)
    manifest = _load_manifest(args.manifest)
    rec = evaluate_pair(manifest, args.noise, args.base, args.high, cfg,
                        seed=args.seed, jobs=args.jobs)
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(rec.to_dict(), fh, indent=2)
            fh.write("\n")
    b, h = np.asarray(rec.wcr_base), np.asarray(rec.wcr_high)
    arrow = {"increase": "↑", "decrease": "↓", "none": "="}[rec.test.direction]
    print(f"{args.base:g}/{args.high:g}  "
          f"{b.mean():.2f}±{b.std(ddof=1):.2f}  "
          f"{h.mean():.2f}±{h.std(ddof=1):.2f}  "
          f"{arrow}{'*' if rec.significant else ''}  p={rec.test.p_value:.4g}")
    return 0


def _cmd_fit_map(args) -> int:
    report = fit_mapping(load_observations(args.pairs))
    if args.out:
        report.params.to_json(args.out)
    print(f"a = {report.params.a:.6f}")
    print(f"b = {report.params.b:.6f}")
    print(f"rmse = {report.rmse:.6f}")
    print(f"pearson_r = {report.pearson_r:.6f}")
    print(f"iterations = {report.n_iter} converged = {report.converged}")
    return 0


def _cmd_gen_noise(args) -> int:
    cfg = _load_config(args)
    spec = NoiseSpec(args.kind, args.level, args.seed, args.seconds)
    if args.kind == "ssn":
        if not args.ltass:
            raise ConfigError("--ltass CSV is required for SSN")
        envelope = SpectrumEnvelope.from_csv(args.ltass)
        sig = generate_ssn(envelope, spec, cfg.calibration, rate=args.rate)
    elif args.kind == "babble":
        if not args.streams:
            raise ConfigError("--streams WAVs are required for babble")
        streams = [read_wav(p) for p in args.streams]
        sig = assemble_babble(streams, cfg.n_talkers, spec, cfg.calibration)
    else:
        raise ConfigError(f"cannot synthesize noise of kind {args.kind!r}")
    clipped = write_wav(sig, args.out, bits=args.bits)
    if clipped:
        log.warning("%d samples clipped writing %s", clipped, args.out)
    return 0


def _cmd_self_feedback(args) -> int:
    cfg = _load_config(args)
    params = cfg.feedback
    if args.air_gain is not None or args.bone_gain is not None \
            or args.cutoff is not None:
        params = FeedbackParams(
            air_gain=params.air_gain if args.air_gain is None else args.air_gain,
            bone_gain=params.bone_gain if args.bone_gain is None else args.bone_gain,
            bone_cutoff_hz=params.bone_cutoff_hz if args.cutoff is None else args.cutoff)
    sig = apply_self_feedback(read_wav(args.infile), params)
    clipped = write_wav(sig, args.out, bits=args.bits)
    if clipped:
        log.warning("%d samples clipped writing %s", clipped, args.out)
    return 0


def _cmd_stoi(args) -> int:
    cfg = _load_config(args)
    score = stoi(read_wav(args.clean), read_wav(args.degraded), cfg.stoi)
    print(f"{score.d:.6f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lombardkit",
        description="Lombard-speech flavor classification toolkit")
    parser.add_argument("--version", action="version",
                        version=f"lombardkit {_package_version()} "
                                f"(config-schema {CONFIG_SCHEMA_VERSION})")
    parser.add_argument("--json-errors", action="store_true",
                        help="print errors as single-line JSON on stderr")
    parser.add_argument("--verbose", "-v", action="store_true",
                        help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", metavar="command")

    p = sub.add_parser("classify", help="walk the ladder and report transitions")
    p.add_argument("--manifest", required=True)
    p.add_argument("--noise", required=True, choices=("ssn", "babble"))
    p.add_argument("--config")
    p.add_argument("--out", help="report path; format from extension")
    p.add_argument("--format", choices=("text", "csv", "json"))
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    p.add_argument("--skip-audio-check", action="store_true",
                   help="skip decoding every file during manifest validation")
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("evaluate-pair", help="compare two ladder levels")
    p.add_argument("--manifest", required=True)
    p.add_argument("--noise", required=True, choices=("ssn", "babble"))
    p.add_argument("--base", type=float, required=True)
    p.add_argument("--high", type=float, required=True)
    p.add_argument("--config")
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    p.add_argument("--out", help="write the full record as JSON")
    p.set_defaults(func=_cmd_evaluate_pair)

    p = sub.add_parser("fit-map", help="fit the score mapping to observations")
    p.add_argument("--pairs", required=True, help="CSV with stoi,wcr columns")
    p.add_argument("--out", help="write fitted parameters as JSON")
    p.set_defaults(func=_cmd_fit_map)

    p = sub.add_parser("gen-noise", help="synthesize a noise WAV")
    p.add_argument("--kind", required=True, choices=("ssn", "babble"))
    p.add_argument("--level", type=float, required=True, help="target dBA")
    p.add_argument("--seconds", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--ltass", help="spectrum envelope CSV (SSN)")
    p.add_argument("--streams", nargs="+", help="talker WAVs (babble)")
    p.add_argument("--rate", type=int, default=48_000)
    p.add_argument("--bits", type=int, default=24, choices=(16, 24, 32))
    p.add_argument("--config")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_gen_noise)

    p = sub.add_parser("self-feedback", help="render own-voice feedback speech")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--air-gain", type=float)
    p.add_argument("--bone-gain", type=float)
    p.add_argument("--cutoff", type=float, help="bone-path low-pass cutoff Hz")
    p.add_argument("--bits", type=int, default=24, choices=(16, 24, 32))
    p.add_argument("--config")
    p.set_defaults(func=_cmd_self_feedback)

    p = sub.add_parser("stoi", help="intelligibility score of degraded vs clean")
    p.add_argument("--clean", required=True)
    p.add_argument("--degraded", required=True)
    p.add_argument("--config")
    p.set_defaults(func=_cmd_stoi)

    return parser


def _emit_error(json_errors: bool, exc: BaseException) -> None:
    if json_errors:
        line = json.dumps({"error": type(exc).__name__, "message": str(exc)})
        print(line, file=sys.stderr)
    else:
        print(f"error: {exc}", file=sys.stderr)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse handles --help/usage itself
        return int(exc.code or 0)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    logging.basicConfig(stream=sys.stderr,
                        level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, ManifestError, FileNotFoundError) as exc:
        _emit_error(args.json_errors, exc)
        return 2
    except LombardkitError as exc:
        _emit_error(args.json_errors, exc)
        return 1
    except Exception as exc:  # noqa: BLE001 - last-resort CLI boundary
        _emit_error(args.json_errors, exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
