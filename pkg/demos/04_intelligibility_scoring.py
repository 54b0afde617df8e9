"""
Scoring intelligibility across signal-to-noise ratios
=====================================================

The objective metric compares short-time third-octave envelopes of a clean
reference and a degraded mixture and returns a score d in [0, 1]. Mapped
through the logistic curve it becomes a predicted word correct rate. This
demo sweeps SNR and prints both numbers side by side.
"""

import numpy as np

from lombardkit import (AudioSignal, CalibrationRef, NoiseSpec, estimate_ltass,
                        generate_ssn, map_stoi_to_wcr, stoi)
from lombardkit.audio import scale_to_level
from lombardkit.mapping import PUBLISHED_2024


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
utterances = [make_utterance(seed) for seed in range(8)]
noise = generate_ssn(estimate_ltass(utterances),
                     NoiseSpec("ssn", 65.0, seed=5, duration=12.0),
                     cal, rate=16_000)

# identical signals score exactly 1.0
clean = scale_to_level(utterances[0], 65.0, cal)
print(f"sanity: d(clean, clean) = {stoi(clean, clean).d:.6f}")
print()
print("   SNR      mean d    predicted WCR")

# sweep SNR: speech pinned at 65 dBA, the noise segment set to 65 - SNR
for snr in (15.0, 10.0, 5.0, 0.0, -5.0, -10.0, -15.0):
    scores = []
    for utt in utterances:
        sp = scale_to_level(utt, 65.0, cal)
        seg = scale_to_level(AudioSignal(noise.samples[:len(sp)], 16_000),
                             65.0 - snr, cal)
        mix = AudioSignal(sp.samples + seg.samples, 16_000)
        scores.append(stoi(sp, mix).d)
    d = float(np.mean(scores))
    wcr = float(map_stoi_to_wcr(d, PUBLISHED_2024))
    print(f"{snr:6.1f} dB   {d:.4f}    {wcr:6.2f} %")
