"""Deterministic synthetic speech corpus with plantable intelligibility steps.

Real Lombard corpora are recorded, not computed; this module fabricates a
stand-in at desk scale. Each "sentence" is a spectrally tilted noise carrier
under a syllabic amplitude envelope, identical across ladder levels except
for (a) a per-level presentation gain, (b) a tiny per-level jitter so no two
files are bit-identical, and (c) optionally a planted high-frequency
emphasis that switches on in stages at chosen ladder levels. The emphasis
widens downward in frequency per stage, so every planted stage adds newly
boosted bands and the intelligibility metric gains a fresh, measurable step
that survives energy matching.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .audio import AudioSignal, CalibrationRef, scale_to_level, write_wav
from .classifier import derived_seed
from .errors import ConfigError
from .manifest import CorpusManifest, DEFAULT_LADDER, ManifestEntry

_JITTER_DB = -34.0
_SYLLABLE_HZ = (2.5, 4.5)
_DURATION_S = (2.0, 2.4)
_PAD_S = 0.12

#: Lower knee of the planted emphasis per stage (stage 1, 2, 3, ...).
_STAGE_KNEES_HZ = (2600.0, 1900.0, 1350.0, 950.0)


def _voice_shape(freqs: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Per-speaker spectral colour: smooth random bumps on a speech-like tilt."""
    logf = np.log(np.maximum(freqs, 20.0))
    tilt_db = np.where(freqs <= 500.0, 0.0,
                       -9.0 * np.log2(np.maximum(freqs, 500.0) / 500.0))
    bumps = np.zeros_like(logf)
    for _ in range(4):
        center = rng.uniform(np.log(200.0), np.log(4000.0))
        width = rng.uniform(0.3, 0.8)
        height = rng.uniform(-3.0, 3.0)
        bumps += height * np.exp(-0.5 * ((logf - center) / width) ** 2)
    return 10.0 ** ((tilt_db + bumps) / 20.0)


def _syllabic_envelope(n: int, rate: int, rng: np.random.Generator) -> np.ndarray:
    t = np.arange(n) / rate
    syl = rng.uniform(*_SYLLABLE_HZ)
    phase = rng.uniform(0.0, 2.0 * np.pi)
    env = (0.5 + 0.5 * np.sin(2.0 * np.pi * syl * t + phase)) ** 1.5
    env = 0.15 + 0.85 * env
    ramp = int(0.010 * rate)
    env[:ramp] *= 0.5 - 0.5 * np.cos(np.pi * np.arange(ramp) / ramp)
    env[-ramp:] *= 0.5 + 0.5 * np.cos(np.pi * np.arange(ramp) / ramp)
    pad = np.zeros(int(_PAD_S * rate))
    return np.concatenate([pad, env, pad])


def _master_utterance(rate: int, corpus_seed: int,
                      speaker: int, sentence: int) -> np.ndarray:
    rng = np.random.default_rng(derived_seed("utterance", corpus_seed,
                                             speaker, sentence))
    duration = rng.uniform(*_DURATION_S)
    n = int(round(duration * rate))
    carrier = rng.standard_normal(n)
    spectrum = np.fft.rfft(carrier)
    freqs = np.fft.rfftfreq(n, 1.0 / rate)
    voice_rng = np.random.default_rng(derived_seed("voice", corpus_seed, speaker))
    shape = _voice_shape(freqs, voice_rng)
    carrier = np.fft.irfft(spectrum * shape, n)
    env = _syllabic_envelope(n, rate, rng)
    out = np.zeros(env.size)
    pad = (env.size - n) // 2
    out[pad:pad + n] = carrier * env[pad:pad + n]
    return out


def _planted_gain(freqs: np.ndarray, stage: int, gain_db: float) -> np.ndarray:
    """Emphasis magnitude for a planted stage: flat below the stage knee,
    +gain_db above, ramped over +-15% in log-frequency."""
    if stage <= 0:
        return np.ones_like(freqs)
    knee = _STAGE_KNEES_HZ[min(stage, len(_STAGE_KNEES_HZ)) - 1]
    lo, hi = np.log(knee / 1.15), np.log(knee * 1.15)
    x = np.clip((np.log(np.maximum(freqs, 1.0)) - lo) / (hi - lo), 0.0, 1.0)
    ramp = x * x * (3.0 - 2.0 * x)
    return 10.0 ** (gain_db * ramp / 20.0)


def build_synthetic_corpus(root, noise_type: str = "ssn", n_speakers: int = 5,
                           n_sentences: int = 20,
                           ladder: tuple[float, ...] = DEFAULT_LADDER,
                           planted_levels: tuple[float, ...] = (45.0, 65.0, 75.0),
                           planted: bool = True, seed: int = 2024,
                           rate: int = 16_000, speech_offset_db: float = -8.0,
                           shelf_gain_db: float = 10.0,
                           cal: CalibrationRef = CalibrationRef()) -> CorpusManifest:
    """Write a synthetic ladder corpus under `root` and return its manifest.

    With `planted` set, recordings at or above each level in
    `planted_levels` carry one more emphasis stage than the level below, so
    a correct classifier must report exactly those transition points. The
    control variant (`planted=False`) differs between levels only by gain
    and jitter and must yield no transitions. Speech is presented
    `speech_offset_db` relative to its nominal ladder level; files are
    24-bit so the quietest levels stay far above the quantization floor.
    """
    if planted and len(planted_levels) > len(_STAGE_KNEES_HZ):
        raise ConfigError(f"at most {len(_STAGE_KNEES_HZ)} planted levels supported")
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    planted_sorted = sorted(planted_levels)
    entries = []
    for sp in range(n_speakers):
        speaker_id = f"sp{sp:02d}"
        (root / speaker_id).mkdir(exist_ok=True)
        for sn in range(n_sentences):
            sentence_id = f"sn{sn:02d}"
            master = _master_utterance(rate, seed, sp, sn)
            spectrum = np.fft.rfft(master)
            freqs = np.fft.rfftfreq(master.size, 1.0 / rate)
            for level in ladder:
                stage = sum(1 for t in planted_sorted if level >= t) if planted else 0
                samples = np.fft.irfft(
                    spectrum * _planted_gain(freqs, stage, shelf_gain_db),
                    master.size)
                jitter_rng = np.random.default_rng(
                    derived_seed("jitter", seed, sp, sn, level))
                jitter = jitter_rng.standard_normal(samples.size)
                # confine jitter to the utterance span so the pads stay silent
                env_mask = np.abs(master) > 0
                scale = np.sqrt(np.mean(samples ** 2)) * 10.0 ** (_JITTER_DB / 20.0)
                samples = samples + jitter * scale * env_mask
                sig = scale_to_level(AudioSignal(samples, rate),
                                     level + speech_offset_db, cal)
                rel = f"{speaker_id}/{sentence_id}_lv{level:05.1f}.wav"
                write_wav(sig, root / rel, bits=24)
                entries.append(ManifestEntry(speaker_id, noise_type, float(level),
                                             sentence_id, rel))
    manifest = CorpusManifest(tuple(entries), ladder=tuple(float(v) for v in ladder),
                              root=root)
    manifest.to_csv(root / "manifest.csv")
    return manifest
