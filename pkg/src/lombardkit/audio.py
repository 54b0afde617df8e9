"""Waveform I/O, resampling, energy measures, A-weighted metering and calibration.

The digital<->acoustic link is a convention: a signal with an RMS of 1.0
(0 dBFS RMS) is assigned ``CalibrationRef.dbfs_to_spl_offset`` dB SPL,
100 dB by default. Every level in the pipeline is relative, so any fixed
offset yields the same conclusions.
"""

from __future__ import annotations

import math
import struct
import warnings
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np
from scipy.signal import resample_poly

from .errors import InvalidSignalError, UnsupportedWavError, WavFormatError
from .frames import (
    active_frame_mask,
    frame_energies_db,
    frame_signal,
    hann_window,
    overlap_add,
)

#: Weighted RMS below this is reported as the measurement-floor sentinel (-inf dBA).
MEASUREMENT_FLOOR_RMS = 1e-10

#: Frame length / hop of the speech-activity criterion, in samples at ACTIVITY_RATE.
ACTIVITY_RATE = 10_000
ACTIVITY_FRAME_LEN = 256
ACTIVITY_HOP = 128
ACTIVITY_RANGE_DB = 40.0


@dataclass(frozen=True)
class AudioSignal:
    """A mono sampled waveform; samples are dimensionless, nominally in [-1, 1]."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise InvalidSignalError(f"samples must be 1-D, got shape {samples.shape}")
        if samples.size < 1:
            raise InvalidSignalError("signal must contain at least one sample")
        if not np.all(np.isfinite(samples)):
            raise InvalidSignalError("signal contains NaN or Inf samples")
        if int(self.sample_rate) <= 0:
            raise InvalidSignalError(f"sample_rate must be positive, got {self.sample_rate}")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration(self) -> float:
        """Length in seconds."""
        return self.samples.size / self.sample_rate


@dataclass(frozen=True)
class CalibrationRef:
    """Binds digital RMS to acoustic level: 0 dBFS RMS sits at ``dbfs_to_spl_offset`` dB SPL."""

    dbfs_to_spl_offset: float = 100.0

    def __post_init__(self):
        if not math.isfinite(self.dbfs_to_spl_offset):
            raise InvalidSignalError("calibration offset must be finite")


# ---------------------------------------------------------------------------
# WAV I/O (RIFF container, PCM 16/24-bit integer and IEEE float-32)
# ---------------------------------------------------------------------------

_WAVE_FORMAT_PCM = 1
_WAVE_FORMAT_IEEE_FLOAT = 3
_WAVE_FORMAT_EXTENSIBLE = 0xFFFE


def read_wav(path) -> AudioSignal:
    """Read a WAV file into an AudioSignal with samples scaled to [-1, 1].

    Supports PCM 16-bit, PCM 24-bit and IEEE float-32, mono or multichannel
    (channels are averaged to mono with a warning).

    Raises FileNotFoundError for a missing file, WavFormatError for a
    malformed container and UnsupportedWavError for other encodings.
    """
    raw = Path(path).read_bytes()
    if len(raw) < 12 or raw[0:4] != b"RIFF" or raw[8:12] != b"WAVE":
        raise WavFormatError(f"{path}: not a RIFF/WAVE file")

    fmt = None
    data = None
    pos = 12
    while pos + 8 <= len(raw):
        chunk_id = raw[pos:pos + 4]
        (chunk_size,) = struct.unpack_from("<I", raw, pos + 4)
        body = raw[pos + 8:pos + 8 + chunk_size]
        if chunk_id == b"fmt ":
            if chunk_size < 16 or len(body) < 16:
                raise WavFormatError(f"{path}: truncated fmt chunk")
            fmt = struct.unpack_from("<HHIIHH", body, 0)
            if fmt[0] == _WAVE_FORMAT_EXTENSIBLE:
                # Sub-format GUID starts with the effective format tag.
                if len(body) < 26:
                    raise WavFormatError(f"{path}: truncated extensible fmt chunk")
                (sub_tag,) = struct.unpack_from("<H", body, 24)
                fmt = (sub_tag,) + fmt[1:]
        elif chunk_id == b"data":
            if len(body) < chunk_size:
                raise WavFormatError(f"{path}: data chunk extends past end of file")
            data = body
        pos += 8 + chunk_size + (chunk_size & 1)  # chunks are word-aligned

    if fmt is None or data is None:
        raise WavFormatError(f"{path}: missing fmt or data chunk")

    tag, n_channels, sample_rate, _, _, bits = fmt
    if n_channels < 1:
        raise WavFormatError(f"{path}: zero channels")

    if tag == _WAVE_FORMAT_PCM and bits == 16:
        frames = np.frombuffer(data[:len(data) - len(data) % 2], dtype="<i2")
        samples = frames.astype(np.float64) / 32768.0
    elif tag == _WAVE_FORMAT_PCM and bits == 24:
        usable = len(data) - len(data) % 3
        b = np.frombuffer(data[:usable], dtype=np.uint8).reshape(-1, 3).astype(np.uint32)
        vals = (b[:, 0] | (b[:, 1] << 8) | (b[:, 2] << 16)).astype(np.int64)
        vals = (vals ^ 0x800000) - 0x800000  # sign-extend 24 -> 64 bit
        samples = vals.astype(np.float64) / 8388608.0
    elif tag == _WAVE_FORMAT_IEEE_FLOAT and bits == 32:
        frames = np.frombuffer(data[:len(data) - len(data) % 4], dtype="<f4")
        samples = frames.astype(np.float64)
    else:
        raise UnsupportedWavError(
            f"{path}: unsupported encoding (format tag {tag}, {bits}-bit); "
            "expected PCM 16/24-bit or float-32"
        )

    if n_channels > 1:
        usable = samples.size - samples.size % n_channels
        samples = samples[:usable].reshape(-1, n_channels).mean(axis=1)
        warnings.warn(f"{path}: averaged {n_channels} channels to mono", stacklevel=2)

    if samples.size == 0:
        raise WavFormatError(f"{path}: empty data chunk")
    return AudioSignal(samples, sample_rate)


def write_wav(signal: AudioSignal, path, bits: int = 16) -> int:
    """Write an AudioSignal as a mono WAV file.

    ``bits`` selects the encoding: 16 or 24 (integer PCM) or 32 (IEEE float).
    Samples outside [-1, 1] are clipped; the number of clipped samples is
    returned so callers can surface the warning.
    """
    x = np.asarray(signal.samples, dtype=np.float64)
    if x.size < 1:
        raise InvalidSignalError("refusing to write an empty signal")
    if not np.all(np.isfinite(x)):
        raise InvalidSignalError("refusing to write NaN/Inf samples")

    n_clipped = int(np.count_nonzero((x < -1.0) | (x > 1.0)))
    if n_clipped:
        warnings.warn(f"clipped {n_clipped} samples outside [-1, 1]", stacklevel=2)
        x = np.clip(x, -1.0, 1.0)

    if bits == 16:
        ints = np.clip(np.round(x * 32768.0), -32768, 32767).astype("<i2")
        payload = ints.tobytes()
        fmt_tag, block = _WAVE_FORMAT_PCM, 2
    elif bits == 24:
        ints = np.clip(np.round(x * 8388608.0), -8388608, 8388607).astype("<i4")
        payload = ints.astype("<u4").view(np.uint8).reshape(-1, 4)[:, :3].tobytes()
        fmt_tag, block = _WAVE_FORMAT_PCM, 3
    elif bits == 32:
        payload = x.astype("<f4").tobytes()
        fmt_tag, block = _WAVE_FORMAT_IEEE_FLOAT, 4
    else:
        raise UnsupportedWavError(f"unsupported bit depth {bits}; use 16, 24 or 32")

    rate = signal.sample_rate
    header = b"".join([
        b"RIFF",
        struct.pack("<I", 36 + len(payload)),
        b"WAVE",
        b"fmt ",
        struct.pack("<IHHIIHH", 16, fmt_tag, 1, rate, rate * block, block,
                    8 * block),
        b"data",
        struct.pack("<I", len(payload)),
    ])
    Path(path).write_bytes(header + payload)
    return n_clipped


# ---------------------------------------------------------------------------
# Resampling and energy measures
# ---------------------------------------------------------------------------

def resample(signal: AudioSignal, target_rate: int) -> AudioSignal:
    """Polyphase resampling with anti-aliasing; identity when rates match."""
    if target_rate <= 0:
        raise InvalidSignalError(f"target_rate must be positive, got {target_rate}")
    if target_rate == signal.sample_rate:
        return signal
    ratio = Fraction(int(target_rate), signal.sample_rate)
    out = resample_poly(signal.samples, ratio.numerator, ratio.denominator,
                        padtype="line")
    return AudioSignal(out, target_rate)


def rms(signal: AudioSignal) -> float:
    """Root-mean-square amplitude of the whole signal."""
    return float(np.sqrt(np.mean(np.square(signal.samples))))


def active_rms(signal: AudioSignal) -> float:
    """RMS over speech-active frames only.

    The activity criterion matches the silent-frame removal used by the
    intelligibility metric: 256-sample Hann frames at 10 kHz with 50% overlap,
    discarding frames more than 40 dB below the loudest. Pauses therefore do
    not dilute the energy estimate.
    """
    work = resample(signal, ACTIVITY_RATE)
    window = hann_window(ACTIVITY_FRAME_LEN)
    frames = frame_signal(work.samples, ACTIVITY_FRAME_LEN, ACTIVITY_HOP) * window
    if frames.shape[0] == 0:
        raise InvalidSignalError("signal too short for the activity criterion")
    if np.max(np.abs(work.samples)) == 0.0:
        raise InvalidSignalError("silent signal has no active frames")
    mask = active_frame_mask(frame_energies_db(frames), ACTIVITY_RANGE_DB)
    kept = overlap_add(frames[mask], ACTIVITY_HOP)
    return float(np.sqrt(np.mean(np.square(kept))))


def match_rms(source: AudioSignal, reference: AudioSignal) -> AudioSignal:
    """Scale ``source`` so its active-frame RMS equals that of ``reference``."""
    gain = active_rms(reference) / active_rms(source)
    return AudioSignal(source.samples * gain, source.sample_rate)


# ---------------------------------------------------------------------------
# A-weighted level metering
# ---------------------------------------------------------------------------

# Pole frequencies of the analog A-curve prototype (Hz).
_A_F1 = 20.598997
_A_F2 = 107.65265
_A_F3 = 737.86223
_A_F4 = 12194.217


def _a_magnitude_raw(freqs: np.ndarray) -> np.ndarray:
    f2 = np.square(np.asarray(freqs, dtype=np.float64))
    num = (_A_F4 ** 2) * f2 * f2
    den = (
        (f2 + _A_F1 ** 2)
        * np.sqrt((f2 + _A_F2 ** 2) * (f2 + _A_F3 ** 2))
        * (f2 + _A_F4 ** 2)
    )
    return num / den


def a_weighting_magnitude(freqs) -> np.ndarray:
    """Linear magnitude of the A-weighting curve, exactly unity at 1 kHz."""
    return _a_magnitude_raw(freqs) / _a_magnitude_raw(np.array(1000.0))


def a_weighted_level(signal: AudioSignal, cal: CalibrationRef = CalibrationRef()) -> float:
    """A-weighted level of the signal in dBA under the calibration convention.

    The weighting is applied as a zero-phase multiplication of the signal
    spectrum by the exact analog A-curve magnitude; the weighted RMS follows
    from Parseval's theorem. Returns -inf (below measurement floor) when the
    weighted RMS is under MEASUREMENT_FLOOR_RMS.
    """
    if signal.sample_rate < 8000:
        raise InvalidSignalError(
            f"sample rate {signal.sample_rate} too low for A-weighting (need >= 8000)"
        )
    n = signal.samples.size
    spectrum = np.fft.rfft(signal.samples)
    weighted_sq = np.square(np.abs(spectrum)) * np.square(
        a_weighting_magnitude(np.fft.rfftfreq(n, 1.0 / signal.sample_rate))
    )
    # Parseval for the one-sided spectrum: interior bins count twice.
    counts = np.full(weighted_sq.size, 2.0)
    counts[0] = 1.0
    if n % 2 == 0:
        counts[-1] = 1.0
    rms_w = math.sqrt(float(np.dot(counts, weighted_sq)) / (n * n))
    if rms_w < MEASUREMENT_FLOOR_RMS:
        return -math.inf
    return 20.0 * math.log10(rms_w) + cal.dbfs_to_spl_offset


def scale_to_level(signal: AudioSignal, target_dba: float,
                   cal: CalibrationRef = CalibrationRef()) -> AudioSignal:
    """Apply the pure gain that brings the A-weighted level to ``target_dba``."""
    current = a_weighted_level(signal, cal)
    if current == -math.inf:
        raise InvalidSignalError("cannot scale a silent signal to a level target")
    gain = 10.0 ** ((target_dba - current) / 20.0)
    return AudioSignal(signal.samples * gain, signal.sample_rate)
