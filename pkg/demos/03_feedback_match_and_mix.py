"""
Own-voice feedback, energy matching and controlled mixing
=========================================================

Before two recordings are compared they pass through the same chain:
an own-voice feedback model (air conduction plus low-passed bone
conduction), an active-speech energy match, and a mix with one shared
noise segment at a fixed A-weighted level. This demo walks that chain
on two synthetic utterances spoken at different efforts.
"""

import numpy as np

from lombardkit import (AudioSignal, CalibrationRef, FeedbackParams,
                        NoiseSpec, apply_self_feedback, estimate_ltass,
                        generate_ssn)
from lombardkit.audio import a_weighted_level, active_rms, match_rms, rms, scale_to_level


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

# quiet and loud takes of "the same" speech at 55 and 70 dBA
quiet = scale_to_level(make_utterance(0), 55.0, cal)
loud = scale_to_level(make_utterance(1), 70.0, cal)

# what the talker hears: air path plus bone path low-passed at 1 kHz
fb = FeedbackParams(air_gain=1.0, bone_gain=1.0, bone_cutoff_hz=1000.0)
quiet_fb = apply_self_feedback(quiet, fb)
loud_fb = apply_self_feedback(loud, fb)
print(f"feedback level, quiet take: {a_weighted_level(quiet_fb, cal):.2f} dBA")
print(f"feedback level, loud take:  {a_weighted_level(loud_fb, cal):.2f} dBA")

# energy match: the quiet take is raised to the loud take's active RMS
matched = match_rms(quiet_fb, loud_fb)
print(f"active RMS after match: {active_rms(matched):.6e} "
      f"vs {active_rms(loud_fb):.6e}")

# one shared noise realization, scaled to 65 dBA for both mixtures;
# the spectrum estimate uses a wider pool so it is not starved for data
envelope = estimate_ltass([make_utterance(seed) for seed in range(10)])
noise = generate_ssn(envelope, NoiseSpec("ssn", 65.0, seed=3, duration=12.0),
                     cal, rate=16_000)
for name, speech in (("matched", matched), ("loud", loud_fb)):
    seg = scale_to_level(AudioSignal(noise.samples[:len(speech)], 16_000),
                         65.0, cal)
    mix = AudioSignal(speech.samples + seg.samples, 16_000)
    snr = 20.0 * np.log10(active_rms(speech) / rms(seg))
    print(f"{name:8s} mixture: SNR = {snr:6.2f} dB, "
          f"level = {a_weighted_level(mix, cal):.2f} dBA")
