"""Shared fixtures: deterministic signals and small on-disk corpora."""

from __future__ import annotations

import numpy as np
import pytest

from lombardkit import AudioSignal, build_synthetic_corpus


def make_tone(freq: float, seconds: float = 1.0, rate: int = 48_000,
              amplitude: float = 0.1, phase: float = 0.0) -> AudioSignal:
    t = np.arange(int(round(seconds * rate))) / rate
    return AudioSignal(amplitude * np.sin(2.0 * np.pi * freq * t + phase), rate)


def make_utterance(seed: int, seconds: float = 2.2, rate: int = 16_000,
                   pad_s: float = 0.1) -> AudioSignal:
    """Speech-shaped modulated noise with silent head/tail padding."""
    rng = np.random.default_rng(seed)
    n = int(round(seconds * rate))
    carrier = rng.standard_normal(n)
    spectrum = np.fft.rfft(carrier)
    freqs = np.fft.rfftfreq(n, 1.0 / rate)
    tilt = np.where(freqs <= 500.0, 1.0,
                    (np.maximum(freqs, 500.0) / 500.0) ** -1.5)
    carrier = np.fft.irfft(spectrum * tilt, n)
    t = np.arange(n) / rate
    syl = rng.uniform(2.5, 4.5)
    env = 0.15 + 0.85 * (0.5 + 0.5 * np.sin(2.0 * np.pi * syl * t)) ** 1.5
    samples = carrier * env
    samples /= np.max(np.abs(samples)) * 4.0
    pad = np.zeros(int(pad_s * rate))
    return AudioSignal(np.concatenate([pad, samples, pad]), rate)


@pytest.fixture(scope="session")
def utterances() -> list[AudioSignal]:
    return [make_utterance(seed) for seed in range(10)]


@pytest.fixture(scope="session")
def mini_corpus(tmp_path_factory):
    """Planted 2-speaker, 6-sentence ladder corpus (fast classifier tests)."""
    root = tmp_path_factory.mktemp("mini_planted")
    return build_synthetic_corpus(root, n_speakers=2, n_sentences=6, seed=11)


@pytest.fixture(scope="session")
def mini_control_corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("mini_control")
    return build_synthetic_corpus(root, n_speakers=2, n_sentences=6, seed=11,
                                  planted=False)
