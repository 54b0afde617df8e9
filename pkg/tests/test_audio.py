"""Waveform I/O, resampling, energy measures and A-weighted metering."""

import math
import struct

import numpy as np
import pytest

from conftest import make_tone, make_utterance
from oracles import a_weight_db, fft_peak_hz
from lombardkit import (AudioSignal, CalibrationRef, InvalidSignalError,
                        UnsupportedWavError, WavFormatError, a_weighted_level,
                        a_weighting_magnitude, active_rms, match_rms, read_wav,
                        resample, rms, scale_to_level, write_wav)


class TestAudioSignal:
    def test_validates_shape_and_content(self):
        with pytest.raises(InvalidSignalError):
            AudioSignal(np.zeros((2, 3)), 16000)
        with pytest.raises(InvalidSignalError):
            AudioSignal(np.array([]), 16000)
        with pytest.raises(InvalidSignalError):
            AudioSignal(np.array([0.0, np.nan]), 16000)
        with pytest.raises(InvalidSignalError):
            AudioSignal(np.zeros(4), 0)

    def test_duration(self):
        sig = AudioSignal(np.zeros(8000), 16000)
        assert len(sig) == 8000
        assert sig.duration == pytest.approx(0.5)


class TestWavRoundTrip:
    @pytest.mark.parametrize("bits,tol", [(16, 2.0 ** -15), (24, 2.0 ** -23),
                                          (32, 1e-7)])
    def test_round_trip_accuracy(self, tmp_path, bits, tol):
        rng = np.random.default_rng(4)
        sig = AudioSignal(rng.uniform(-0.9, 0.9, 5000), 16000)
        path = tmp_path / f"rt{bits}.wav"
        clipped = write_wav(sig, path, bits=bits)
        assert clipped == 0
        back = read_wav(path)
        assert back.sample_rate == 16000
        assert len(back) == len(sig)
        assert np.max(np.abs(back.samples - sig.samples)) <= tol

    def test_clipping_reported(self, tmp_path):
        sig = AudioSignal(np.array([0.0, 1.5, -2.0, 0.5]), 8000)
        with pytest.warns(UserWarning, match="clipped"):
            n = write_wav(sig, tmp_path / "clip.wav")
        assert n == 2

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            read_wav(tmp_path / "nope.wav")

    def test_malformed_file(self, tmp_path):
        bad = tmp_path / "bad.wav"
        bad.write_bytes(b"this is not audio at all, not even close")
        with pytest.raises(WavFormatError):
            read_wav(bad)

    def test_unsupported_encoding(self, tmp_path):
        # hand-built 8-bit PCM header, a format the reader does not accept
        payload = bytes(range(64))
        header = (b"RIFF" + struct.pack("<I", 36 + len(payload)) + b"WAVE"
                  + b"fmt " + struct.pack("<IHHIIHH", 16, 1, 1, 8000, 8000, 1, 8)
                  + b"data" + struct.pack("<I", len(payload)))
        p = tmp_path / "u8.wav"
        p.write_bytes(header + payload)
        with pytest.raises(UnsupportedWavError):
            read_wav(p)

    def test_multichannel_averaged(self, tmp_path):
        left = np.full(1000, 0.5)
        right = np.full(1000, -0.5)
        inter = np.empty(2000)
        inter[0::2], inter[1::2] = left, right
        ints = np.round(inter * 32768).astype("<i2")
        payload = ints.tobytes()
        header = (b"RIFF" + struct.pack("<I", 36 + len(payload)) + b"WAVE"
                  + b"fmt " + struct.pack("<IHHIIHH", 16, 1, 2, 16000, 64000, 4, 16)
                  + b"data" + struct.pack("<I", len(payload)))
        p = tmp_path / "stereo.wav"
        p.write_bytes(header + payload)
        with pytest.warns(UserWarning, match="mono"):
            sig = read_wav(p)
        assert len(sig) == 1000
        assert np.max(np.abs(sig.samples)) < 1e-4

    def test_refuses_unknown_bit_depth(self, tmp_path):
        with pytest.raises(UnsupportedWavError):
            write_wav(AudioSignal(np.zeros(4), 8000), tmp_path / "x.wav", bits=12)


class TestResample:
    def test_identity_when_rates_match(self):
        sig = make_tone(440.0, 0.25, rate=16000)
        assert resample(sig, 16000) is sig

    def test_preserves_dc(self):
        sig = AudioSignal(np.full(48000, 0.25), 48000)
        out = resample(sig, 10000)
        assert out.sample_rate == 10000
        assert np.max(np.abs(out.samples - 0.25)) < 1e-4

    def test_preserves_tone_frequency(self):
        sig = make_tone(1000.0, 0.5, rate=48000)
        out = resample(sig, 10000)
        peak = fft_peak_hz(out.samples[200:-200], 10000)
        assert abs(peak - 1000.0) < 2.0

    def test_length_scales_with_ratio(self):
        sig = AudioSignal(np.zeros(48000) + 0.1, 48000)
        out = resample(sig, 16000)
        assert len(out) == 16000

    def test_rejects_bad_rate(self):
        with pytest.raises(InvalidSignalError):
            resample(make_tone(440.0, 0.1), -1)


class TestEnergyMeasures:
    def test_sine_rms(self):
        sig = make_tone(997.0, 1.0, rate=48000, amplitude=0.2)
        assert rms(sig) == pytest.approx(0.2 / math.sqrt(2.0), rel=1e-3)

    def test_active_rms_ignores_silence(self):
        utt = make_utterance(0, pad_s=0.0)
        padded = AudioSignal(
            np.concatenate([np.zeros(len(utt)), utt.samples, np.zeros(len(utt))]),
            utt.sample_rate)
        a_full = active_rms(utt)
        a_padded = active_rms(padded)
        assert a_padded == pytest.approx(a_full, rel=0.02)
        # plain RMS, in contrast, is diluted by the added silence
        assert rms(padded) < 0.7 * rms(utt)

    def test_active_rms_errors(self):
        with pytest.raises(InvalidSignalError):
            active_rms(AudioSignal(np.zeros(16000), 16000))
        with pytest.raises(InvalidSignalError):
            active_rms(AudioSignal(np.ones(8), 16000))

    def test_match_rms_equalizes(self):
        a = make_utterance(1)
        b = AudioSignal(make_utterance(2).samples * 0.05, 16000)
        matched = match_rms(b, a)
        assert active_rms(matched) == pytest.approx(active_rms(a), rel=1e-9)
        assert matched.sample_rate == b.sample_rate


class TestAWeighting:
    def test_unity_at_1khz(self):
        assert float(a_weighting_magnitude(np.array(1000.0))) == 1.0

    @pytest.mark.parametrize("freq,table_db", [(100.0, -19.1), (1000.0, 0.0),
                                               (10000.0, -2.5)])
    def test_matches_standard_table(self, freq, table_db):
        got = 20.0 * math.log10(float(a_weighting_magnitude(np.array(freq))))
        assert abs(got - table_db) <= 0.3

    def test_matches_oracle_curve(self):
        for f in (50.0, 200.0, 500.0, 2000.0, 4000.0, 8000.0, 16000.0):
            got = 20.0 * math.log10(float(a_weighting_magnitude(np.array(f))))
            assert got == pytest.approx(a_weight_db(f), abs=1e-9)

    def test_level_of_1khz_tone_is_unweighted(self):
        cal = CalibrationRef()
        sig = make_tone(1000.0, 1.0, rate=48000, amplitude=0.2)
        expected = 20.0 * math.log10(0.2 / math.sqrt(2.0)) + cal.dbfs_to_spl_offset
        assert a_weighted_level(sig, cal) == pytest.approx(expected, abs=0.05)

    def test_level_of_100hz_tone_is_attenuated(self):
        cal = CalibrationRef()
        sig = make_tone(100.0, 1.0, rate=48000, amplitude=0.2)
        unweighted = 20.0 * math.log10(0.2 / math.sqrt(2.0)) + cal.dbfs_to_spl_offset
        assert a_weighted_level(sig, cal) == pytest.approx(
            unweighted + a_weight_db(100.0), abs=0.3)

    def test_silence_is_below_floor(self):
        assert a_weighted_level(AudioSignal(np.zeros(48000), 48000)) == -math.inf

    def test_low_rate_rejected(self):
        with pytest.raises(InvalidSignalError):
            a_weighted_level(AudioSignal(np.ones(4000), 4000))

    def test_scale_to_level_round_trip(self):
        sig = make_utterance(5)
        for target in (40.0, 65.0, 80.0):
            out = scale_to_level(sig, target)
            assert a_weighted_level(out) == pytest.approx(target, abs=1e-6)

    def test_scale_silent_rejected(self):
        with pytest.raises(InvalidSignalError):
            scale_to_level(AudioSignal(np.zeros(48000), 48000), 60.0)

    def test_custom_calibration_shifts_levels(self):
        sig = make_tone(1000.0, 0.5, rate=48000)
        base = a_weighted_level(sig, CalibrationRef(100.0))
        shifted = a_weighted_level(sig, CalibrationRef(94.0))
        assert base - shifted == pytest.approx(6.0, abs=1e-9)
