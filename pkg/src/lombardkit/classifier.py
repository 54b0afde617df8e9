"""Ladder classification of Lombard speech flavors.

The procedure walks an ascending ladder of noise levels. For each rung it
builds matched-SNR noisy mixtures from the current base level's recordings
and the rung's recordings, scores both groups with the intelligibility
metric mapped to word correct rate, and runs a paired test on per-sentence
means. A significant increase marks a transition point and moves the base
up; the number of flavors is one more than the number of transitions.

Everything is deterministic: noise realizations derive from explicit seeds,
reductions are gathered by index (never completion order), and per-sentence
means use compensated summation so speaker enumeration order cannot change
the last bit.
"""

from __future__ import annotations

import dataclasses
import hashlib
import io
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .audio import AudioSignal, CalibrationRef, active_rms, read_wav, scale_to_level
from .config import PipelineConfig
from .errors import InvalidSignalError, LombardkitError, ManifestError
from .feedback import apply_self_feedback
from .manifest import CorpusManifest
from .mapping import MappingParams, map_stoi_to_wcr
from .noise import NoiseSpec, SpectrumEnvelope, assemble_babble, estimate_ltass, generate_ssn
from .stats import TTestResult, paired_t_test, paired_wilcoxon_test
from .stoi import stoi

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ComparisonRecord:
    """One rung of the ladder: base level versus a higher level."""

    base_level: float
    high_level: float
    wcr_base: tuple[float, ...]
    wcr_high: tuple[float, ...]
    test: TTestResult
    significant: bool
    per_speaker_tests: tuple[TTestResult, ...] = ()

    def to_dict(self) -> dict:
        return {
            "base_level": self.base_level,
            "high_level": self.high_level,
            "wcr_base": list(self.wcr_base),
            "wcr_high": list(self.wcr_high),
            "test": dataclasses.asdict(self.test),
            "significant": self.significant,
            "per_speaker_tests": [dataclasses.asdict(t) for t in self.per_speaker_tests],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ComparisonRecord":
        return cls(base_level=float(d["base_level"]),
                   high_level=float(d["high_level"]),
                   wcr_base=tuple(d["wcr_base"]),
                   wcr_high=tuple(d["wcr_high"]),
                   test=TTestResult(**d["test"]),
                   significant=bool(d["significant"]),
                   per_speaker_tests=tuple(TTestResult(**t)
                                           for t in d.get("per_speaker_tests", [])))


@dataclass(frozen=True)
class LadderResult:
    """Full outcome of a ladder walk for one noise type and seed."""

    noise_type: str
    seed: int
    comparisons: tuple[ComparisonRecord, ...]
    transition_points: tuple[float, ...]
    n_flavors: int

    def to_dict(self) -> dict:
        return {
            "noise_type": self.noise_type,
            "seed": self.seed,
            "comparisons": [c.to_dict() for c in self.comparisons],
            "transition_points": list(self.transition_points),
            "n_flavors": self.n_flavors,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LadderResult":
        return cls(noise_type=d["noise_type"], seed=int(d["seed"]),
                   comparisons=tuple(ComparisonRecord.from_dict(c)
                                     for c in d["comparisons"]),
                   transition_points=tuple(float(t) for t in d["transition_points"]),
                   n_flavors=int(d["n_flavors"]))


def derived_seed(*parts) -> int:
    """Stable 64-bit seed from string-able parts; never Python's hash()."""
    text = "|".join(str(p) for p in parts)
    return int.from_bytes(hashlib.sha256(text.encode()).digest()[:8], "big")


@dataclass
class _RunContext:
    """Per-run state: caches and the noise machinery shared across rungs."""

    manifest: CorpusManifest
    noise_type: str
    cfg: PipelineConfig
    seed: int
    mapping: MappingParams
    rate: int | None = None
    envelope: SpectrumEnvelope | None = None
    streams: list[AudioSignal] | None = None
    feedback_cache: dict = field(default_factory=dict)
    noise_cache: dict = field(default_factory=dict)

    def load(self, path) -> AudioSignal:
        sig = read_wav(path)
        if self.rate is None:
            self.rate = sig.sample_rate
        elif sig.sample_rate != self.rate:
            raise InvalidSignalError(
                f"{path}: rate {sig.sample_rate} differs from corpus rate {self.rate}")
        return sig

    def feedback_for(self, path) -> tuple[AudioSignal, float]:
        key = str(path)
        if key not in self.feedback_cache:
            fb = apply_self_feedback(self.load(path), self.cfg.feedback)
            self.feedback_cache[key] = (fb, active_rms(fb))
        return self.feedback_cache[key]

    def prune_cache(self, keep_paths: set) -> None:
        for key in [k for k in self.feedback_cache if k not in keep_paths]:
            del self.feedback_cache[key]

    def _base_condition_signals(self) -> list[AudioSignal]:
        base = self.manifest.ladder[0]
        cond = self.manifest.condition(self.noise_type, base)
        if not cond:
            raise ManifestError(
                f"no {self.noise_type} entries at ladder base {base} dBA")
        return [self.load(self.manifest.resolve(e))
                for _, e in sorted(cond.items())]

    def ssn_envelope(self) -> SpectrumEnvelope:
        if self.envelope is None:
            if self.cfg.ltass_csv is not None:
                self.envelope = SpectrumEnvelope.from_csv(self.cfg.ltass_csv)
            else:
                self.envelope = estimate_ltass(self._base_condition_signals())
        return self.envelope

    def babble_streams(self) -> list[AudioSignal]:
        if self.streams is None:
            self.streams = self._base_condition_signals()
        return self.streams

    def noise_for(self, high_level: float, sentence_id: str) -> AudioSignal:
        """Noise to overlay at this rung.

        A stationary realization is synthesized once per (noise type, level,
        seed) and shared by every sentence; babble re-rolls the talkers'
        circular offsets per sentence so sentences never see identical
        masker phases.
        """
        if self.rate is None:
            raise InvalidSignalError("no recording loaded before noise synthesis")
        if self.noise_type == "ssn":
            key = ("ssn", high_level)
            if key not in self.noise_cache:
                spec = NoiseSpec("ssn", high_level,
                                 derived_seed("ssn", high_level, self.seed),
                                 self.cfg.noise_duration)
                self.noise_cache[key] = generate_ssn(
                    self.ssn_envelope(), spec, self.cfg.calibration, rate=self.rate)
            return self.noise_cache[key]

        streams = self.babble_streams()
        talkers_key = ("talkers", high_level)
        if talkers_key not in self.noise_cache:
            rng = np.random.default_rng(derived_seed("babble", high_level, self.seed))
            self.noise_cache[talkers_key] = rng.integers(
                0, len(streams), size=self.cfg.n_talkers).tolist()
        talkers = self.noise_cache[talkers_key]
        rng = np.random.default_rng(
            derived_seed("babble-offsets", high_level, self.seed, sentence_id))
        offsets = [int(rng.integers(0, len(streams[i]))) for i in talkers]
        spec = NoiseSpec("babble", high_level, 0, self.cfg.noise_duration)
        return assemble_babble(streams, self.cfg.n_talkers, spec,
                               self.cfg.calibration,
                               talker_indices=talkers, offsets=offsets)


def _mix_with_noise(speech: AudioSignal, noise: AudioSignal, level: float,
                    cal: CalibrationRef) -> AudioSignal:
    """Overlay noise at exactly `level` dBA; the speech keeps its own level."""
    if len(noise) < len(speech):
        raise InvalidSignalError(
            f"noise ({len(noise)} samples) shorter than speech ({len(speech)})")
    seg = scale_to_level(AudioSignal(noise.samples[:len(speech)], noise.sample_rate),
                         level, cal)
    return AudioSignal(speech.samples + seg.samples, speech.sample_rate)


def _sentence_wcr_pair(ctx: _RunContext, base_path, high_path, high_level: float,
                       sentence_id: str) -> tuple[float, float]:
    """WCR for one (speaker, sentence): (base-group value, high-group value)."""
    fb_high, rms_high = ctx.feedback_for(high_path)
    fb_base, rms_base = ctx.feedback_for(base_path)
    matched = AudioSignal(fb_base.samples * (rms_high / rms_base),
                          fb_base.sample_rate)
    noise = ctx.noise_for(high_level, sentence_id)
    cal = ctx.cfg.calibration
    mix_base = _mix_with_noise(matched, noise, high_level, cal)
    mix_high = _mix_with_noise(fb_high, noise, high_level, cal)
    d_base = stoi(matched, mix_base, ctx.cfg.stoi).d
    d_high = stoi(fb_high, mix_high, ctx.cfg.stoi).d
    return (map_stoi_to_wcr(d_base, ctx.mapping),
            map_stoi_to_wcr(d_high, ctx.mapping))


_WORKER_CTX: _RunContext | None = None


def _pool_init(manifest, noise_type, cfg, seed, mapping, envelope, streams):
    global _WORKER_CTX
    _WORKER_CTX = _RunContext(manifest, noise_type, cfg, seed, mapping,
                              envelope=envelope, streams=streams)


def _pool_task(task) -> tuple[float, float]:
    base_path, high_path, high_level, sentence_id = task
    return _sentence_wcr_pair(_WORKER_CTX, base_path, high_path, high_level,
                              sentence_id)


def _paired_test(cfg: PipelineConfig, base_vals, high_vals) -> TTestResult:
    if cfg.test_method == "wilcoxon":
        return paired_wilcoxon_test(base_vals, high_vals, alpha=cfg.alpha)
    return paired_t_test(base_vals, high_vals, alpha=cfg.alpha)


def _evaluate_pair_ctx(ctx: _RunContext, base_level: float, high_level: float,
                       per_speaker: bool = False, jobs: int = 1) -> ComparisonRecord:
    manifest, noise_type, cfg = ctx.manifest, ctx.noise_type, ctx.cfg
    base_cond = manifest.condition(noise_type, base_level)
    high_cond = manifest.condition(noise_type, high_level)
    if not base_cond:
        raise ManifestError(f"no {noise_type} entries at {base_level} dBA")
    if not high_cond:
        raise ManifestError(f"no {noise_type} entries at {high_level} dBA")
    speakers = sorted({sp for sp, _ in base_cond})
    sentences = sorted({sn for _, sn in base_cond})
    for sp in speakers:
        for sn in sentences:
            for cond, lvl in ((base_cond, base_level), (high_cond, high_level)):
                if (sp, sn) not in cond:
                    raise ManifestError(
                        f"missing recording: speaker={sp} noise={noise_type} "
                        f"level={lvl} sentence={sn}")

    tasks = []
    for sp in speakers:
        for sn in sentences:
            tasks.append((str(manifest.resolve(base_cond[(sp, sn)])),
                          str(manifest.resolve(high_cond[(sp, sn)])),
                          high_level, sn))

    results: list[tuple[float, float]] = [None] * len(tasks)
    if jobs > 1:
        # workers get the noise machinery pre-resolved so realizations match
        # the serial path bit for bit
        if noise_type == "ssn":
            envelope, streams = ctx.ssn_envelope(), None
        else:
            envelope, streams = None, ctx.babble_streams()
        with ProcessPoolExecutor(
                max_workers=jobs, initializer=_pool_init,
                initargs=(manifest, noise_type, cfg, ctx.seed, ctx.mapping,
                          envelope, streams)) as pool:
            for i, out in enumerate(pool.map(_pool_task, tasks, chunksize=4)):
                results[i] = out
    else:
        for i, task in enumerate(tasks):
            sp, sn = speakers[i // len(sentences)], sentences[i % len(sentences)]
            try:
                results[i] = _sentence_wcr_pair(ctx, task[0], task[1],
                                                high_level, task[3])
            except LombardkitError as exc:
                raise type(exc)(f"[speaker={sp} sentence={sn}] {exc}") from exc

    n_speakers = len(speakers)
    by_sentence_base, by_sentence_high = [], []
    for j, _ in enumerate(sentences):
        vals = [results[i * len(sentences) + j] for i in range(n_speakers)]
        by_sentence_base.append(math.fsum(v[0] for v in vals) / n_speakers)
        by_sentence_high.append(math.fsum(v[1] for v in vals) / n_speakers)

    test = _paired_test(cfg, by_sentence_base, by_sentence_high)
    speaker_tests = ()
    if per_speaker:
        speaker_tests = tuple(
            _paired_test(cfg,
                         [results[i * len(sentences) + j][0] for j in range(len(sentences))],
                         [results[i * len(sentences) + j][1] for j in range(len(sentences))])
            for i in range(n_speakers))
    return ComparisonRecord(base_level=base_level, high_level=high_level,
                            wcr_base=tuple(by_sentence_base),
                            wcr_high=tuple(by_sentence_high),
                            test=test, significant=test.significant,
                            per_speaker_tests=speaker_tests)


def evaluate_pair(manifest: CorpusManifest, noise_type: str, base_level: float,
                  high_level: float, cfg: PipelineConfig, seed: int | None = None,
                  per_speaker: bool = False, jobs: int = 1) -> ComparisonRecord:
    """Compare intelligibility between one level pair under matched noise.

    Both groups' recordings pass through the own-voice feedback model; the
    base group is energy-matched to the high group, both are overlaid with
    the same noise at the higher level, scored against their pre-mix
    reference, mapped to word correct rate, averaged per sentence across
    speakers, and the per-sentence pairs go to the paired test.
    """
    if base_level not in cfg.ladder or high_level not in cfg.ladder:
        raise ManifestError(f"levels {base_level}/{high_level} not on the ladder")
    if not base_level < high_level:
        raise ManifestError(f"base level {base_level} must be below {high_level}")
    ctx = _RunContext(manifest, noise_type, cfg,
                      cfg.seeds[0] if seed is None else seed,
                      cfg.resolve_mapping())
    return _evaluate_pair_ctx(ctx, base_level, high_level,
                              per_speaker=per_speaker, jobs=jobs)


def classify_ladder(manifest: CorpusManifest, noise_type: str,
                    cfg: PipelineConfig, seed: int | None = None,
                    jobs: int = 1) -> LadderResult:
    """Walk the ladder and locate all transition points.

    The base starts at the lowest level. Each higher level is compared to
    the current base; a significant increase records a transition and the
    base jumps to that level. At most len(ladder) - 1 comparisons run.
    """
    seed = cfg.seeds[0] if seed is None else seed
    levels = manifest.levels(noise_type)
    missing = [lv for lv in cfg.ladder if lv not in levels]
    if missing:
        raise ManifestError(f"manifest lacks {noise_type} levels: {missing}")

    ctx = _RunContext(manifest, noise_type, cfg, seed, cfg.resolve_mapping())
    comparisons: list[ComparisonRecord] = []
    transitions: list[float] = []
    base = cfg.ladder[0]
    for high in cfg.ladder[1:]:
        rec = _evaluate_pair_ctx(ctx, base, high, jobs=jobs)
        comparisons.append(rec)
        log.info("%s seed=%d %g/%g dBA: p=%.3g %s", noise_type, seed, base,
                 high, rec.test.p_value, "transition" if rec.significant else "-")
        if rec.significant:
            transitions.append(high)
            base = high
        keep = {str(manifest.resolve(e)) for e in
                manifest.condition(noise_type, base).values()}
        ctx.prune_cache(keep)

    return LadderResult(noise_type=noise_type, seed=seed,
                        comparisons=tuple(comparisons),
                        transition_points=tuple(transitions),
                        n_flavors=len(transitions) + 1)


def _fmt_level(level: float) -> str:
    return f"{level:g}"


def _mean_sd(values: tuple[float, ...]) -> str:
    arr = np.asarray(values)
    sd = float(np.std(arr, ddof=1)) if arr.size > 1 else 0.0
    return f"{float(np.mean(arr)):.2f}±{sd:.2f}"


def _verdict_mark(rec: ComparisonRecord) -> str:
    arrow = {"increase": "↑", "decrease": "↓", "none": "="}[rec.test.direction]
    return arrow + ("*" if rec.significant else "")


def render_report(result: LadderResult, fmt: str = "text") -> str:
    """Serialize a ladder result as a text table, CSV, or round-trip JSON."""
    if fmt == "json":
        return json.dumps(result.to_dict(), indent=2) + "\n"

    if fmt == "csv":
        out = io.StringIO()
        out.write("base_level,high_level,wcr_base_mean,wcr_base_sd,"
                  "wcr_high_mean,wcr_high_sd,statistic,p_value,direction,significant\n")
        for rec in result.comparisons:
            b, h = np.asarray(rec.wcr_base), np.asarray(rec.wcr_high)
            b_sd = float(np.std(b, ddof=1)) if b.size > 1 else 0.0
            h_sd = float(np.std(h, ddof=1)) if h.size > 1 else 0.0
            out.write(f"{_fmt_level(rec.base_level)},{_fmt_level(rec.high_level)},"
                      f"{float(np.mean(b)):.4f},{b_sd:.4f},"
                      f"{float(np.mean(h)):.4f},{h_sd:.4f},"
                      f"{rec.test.statistic:.6g},{rec.test.p_value:.6g},"
                      f"{rec.test.direction},{rec.significant}\n")
        out.write(f"# transition_points={';'.join(_fmt_level(t) for t in result.transition_points)}\n")
        out.write(f"# n_flavors={result.n_flavors}\n")
        return out.getvalue()

    if fmt != "text":
        raise ValueError(f"unknown report format {fmt!r} (text, csv, json)")

    out = io.StringIO()
    out.write(f"noise type: {result.noise_type}   seed: {result.seed}\n")
    out.write(f"{'levels':<10}{'lower WCR':<16}{'higher WCR':<16}verdict\n")
    for rec in result.comparisons:
        pair = f"{_fmt_level(rec.base_level)}/{_fmt_level(rec.high_level)}"
        out.write(f"{pair:<10}{_mean_sd(rec.wcr_base):<16}"
                  f"{_mean_sd(rec.wcr_high):<16}{_verdict_mark(rec)}\n")
    points = ", ".join(_fmt_level(t) for t in result.transition_points) or "none"
    out.write(f"transition points (dBA): {points}\n")
    out.write(f"flavors: {result.n_flavors}\n")
    return out.getvalue()
