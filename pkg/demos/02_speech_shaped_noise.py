"""
Speech-shaped noise from a measured long-term spectrum
======================================================

Speech-shaped noise (SSN) is stationary noise whose long-term third-octave
spectrum follows average speech. This demo measures the long-term average
speech spectrum (LTASS) of a small synthetic corpus, synthesizes SSN at a
requested A-weighted level, and checks both the level and the spectrum.
"""

import numpy as np

from lombardkit import (AudioSignal, CalibrationRef, NoiseSpec, estimate_ltass,
                        generate_ssn, write_wav)
from lombardkit.audio import a_weighted_level


def make_utterance(seed, seconds=2.2, rate=16_000):
    # speech-like stand-in: spectrally tilted noise with a syllabic envelope
    rng = np.random.default_rng(seed)
    n = int(seconds * rate)
    spectrum = np.fft.rfft(rng.standard_normal(n))
    freqs = np.fft.rfftfreq(n, 1.0 / rate)
    tilt = np.where(freqs <= 500.0, 1.0, (np.maximum(freqs, 500.0) / 500.0) ** -1.5)
    carrier = np.fft.irfft(spectrum * tilt, n)
    t = np.arange(n) / rate
    env = 0.15 + 0.85 * (0.5 + 0.5 * np.sin(2.0 * np.pi * 3.5 * t)) ** 1.5
    samples = carrier * env / (np.max(np.abs(carrier * env)) * 4.0)
    return AudioSignal(samples, rate)


cal = CalibrationRef()

# a handful of synthetic utterances stands in for a speech corpus
utterances = [make_utterance(seed) for seed in range(12)]

# the LTASS estimate: third-octave band levels, max-normalized to 0 dB
envelope = estimate_ltass(utterances)
for cf, lv in zip(envelope.band_centers, envelope.band_levels):
    bar = "#" * max(0, int(round(lv + 40)))
    print(f"{cf:7.1f} Hz  {lv:7.2f} dB  {bar}")

# synthesize 12 s of SSN at 65 dBA; the seed makes it reproducible
spec = NoiseSpec("ssn", level_dba=65.0, seed=101, duration=12.0)
ssn = generate_ssn(envelope, spec, cal, rate=16_000)
print()
print(f"requested 65.0 dBA, measured {a_weighted_level(ssn, cal):.3f} dBA")

# same seed, same samples; a different seed gives a fresh realization
again = generate_ssn(envelope, spec, cal, rate=16_000)
print(f"bit-identical on repeat: {np.array_equal(ssn.samples, again.samples)}")

write_wav(ssn, "ssn_65dBA.wav")
print("wrote ssn_65dBA.wav")
