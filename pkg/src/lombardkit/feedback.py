"""Own-voice feedback model: air-conducted plus low-passed bone-conducted path.

A talker hears their own voice through two routes. The air route is modeled
as a flat gain; the bone route as a gain applied to a low-pass filtered copy,
reflecting the body's attenuation of high frequencies. Output is
``air_gain * x + bone_gain * lowpass(x)``, filtered zero-phase so the two
paths stay time-aligned when summed.
"""

from __future__ import annotations

from dataclasses import dataclass

from scipy.signal import butter, sosfiltfilt

from .audio import AudioSignal
from .errors import ConfigError


@dataclass(frozen=True)
class FeedbackParams:
    """Gains and crossover for the two-path own-voice model."""

    air_gain: float = 1.0
    bone_gain: float = 1.0
    bone_cutoff_hz: float = 1000.0

    def __post_init__(self):
        if self.air_gain < 0 or self.bone_gain < 0:
            raise ConfigError("path gains must be non-negative")
        if self.air_gain == 0 and self.bone_gain == 0:
            raise ConfigError("at least one path gain must be positive")
        if self.bone_cutoff_hz <= 0:
            raise ConfigError("bone-conduction cutoff must be positive")


def apply_self_feedback(signal: AudioSignal,
                        params: FeedbackParams = FeedbackParams()) -> AudioSignal:
    """Simulate the talker-side percept of their own speech.

    The bone path uses a second-order Butterworth low-pass applied forward
    and backward (zero phase, squared magnitude response). A cutoff at or
    above Nyquist degenerates to an all-pass bone path.
    """
    if params.bone_gain == 0.0:
        return AudioSignal(params.air_gain * signal.samples, signal.sample_rate)

    nyquist = signal.sample_rate / 2.0
    if params.bone_cutoff_hz >= nyquist:
        bone = signal.samples
    else:
        sos = butter(2, params.bone_cutoff_hz, btype="low",
                     fs=signal.sample_rate, output="sos")
        bone = sosfiltfilt(sos, signal.samples)
    out = params.air_gain * signal.samples + params.bone_gain * bone
    return AudioSignal(out, signal.sample_rate)
