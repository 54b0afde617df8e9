"""Own-voice feedback model: gains, crossover behavior, zero phase."""

import numpy as np
import pytest

from conftest import make_tone
from lombardkit import (AudioSignal, ConfigError, FeedbackParams,
                        apply_self_feedback)


class TestFeedbackParams:
    def test_defaults(self):
        p = FeedbackParams()
        assert p.air_gain == 1.0
        assert p.bone_gain == 1.0
        assert p.bone_cutoff_hz == 1000.0

    def test_validation(self):
        with pytest.raises(ConfigError):
            FeedbackParams(air_gain=-0.1)
        with pytest.raises(ConfigError):
            FeedbackParams(air_gain=0.0, bone_gain=0.0)
        with pytest.raises(ConfigError):
            FeedbackParams(bone_cutoff_hz=0.0)


class TestApplySelfFeedback:
    def test_air_only_is_pure_gain(self):
        sig = make_tone(440.0, 0.2, rate=16000)
        out = apply_self_feedback(sig, FeedbackParams(air_gain=2.0, bone_gain=0.0))
        np.testing.assert_allclose(out.samples, 2.0 * sig.samples, rtol=1e-15)

    def test_cutoff_at_nyquist_doubles(self):
        sig = make_tone(440.0, 0.2, rate=16000)
        out = apply_self_feedback(sig, FeedbackParams(bone_cutoff_hz=9000.0))
        np.testing.assert_allclose(out.samples, 2.0 * sig.samples, rtol=1e-12)

    def test_low_frequency_gain_approaches_sum(self):
        sig = make_tone(100.0, 1.0, rate=16000)
        out = apply_self_feedback(sig, FeedbackParams())
        mid = slice(4000, 12000)  # avoid filter edge transients
        gain = np.linalg.norm(out.samples[mid]) / np.linalg.norm(sig.samples[mid])
        assert gain == pytest.approx(2.0, abs=0.02)

    def test_high_frequency_gain_approaches_air(self):
        sig = make_tone(5000.0, 1.0, rate=16000)
        out = apply_self_feedback(sig, FeedbackParams())
        mid = slice(4000, 12000)
        gain = np.linalg.norm(out.samples[mid]) / np.linalg.norm(sig.samples[mid])
        assert gain == pytest.approx(1.0, abs=0.02)

    def test_zero_phase(self):
        # an impulse must come back time-aligned and symmetric
        x = np.zeros(4001)
        x[2000] = 1.0
        out = apply_self_feedback(AudioSignal(x, 16000), FeedbackParams())
        assert np.argmax(out.samples) == 2000
        left = out.samples[1000:2000]
        right = out.samples[2001:3001][::-1]
        np.testing.assert_allclose(left, right, atol=1e-12)

    def test_rate_preserved(self):
        sig = make_tone(440.0, 0.1, rate=48000)
        assert apply_self_feedback(sig).sample_rate == 48000
