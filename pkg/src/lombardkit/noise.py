"""Speech-shaped noise, multi-talker babble, and exact-SNR mixing.

Speech-shaped noise (SSN) is Gaussian noise whose spectrum is shaped to the
long-term average spectrum of a speech corpus, summarized as one-third-octave
band levels. All generators are seeded and bit-reproducible.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.signal import welch

from .audio import AudioSignal, CalibrationRef, scale_to_level
from .errors import ConfigError, InvalidSignalError
from .frames import active_frame_mask, frame_energies_db, frame_signal, hann_window

NOISE_KINDS = ("ssn", "babble", "external")

_THIRD = 2.0 ** (1.0 / 3.0)
_EDGE = 2.0 ** (1.0 / 6.0)

#: One-third-octave centers used for spectrum summaries, 125 Hz .. 8 kHz.
LTASS_CENTERS = 125.0 * 2.0 ** (np.arange(19) / 3.0)

_WELCH_SEGMENT = 4096


@dataclass(frozen=True)
class SpectrumEnvelope:
    """One-third-octave band levels (dB, max-normalized to 0) of a spectrum."""

    band_centers: np.ndarray
    band_levels: np.ndarray
    resolution: str = "third-octave"

    def __post_init__(self):
        centers = np.asarray(self.band_centers, dtype=np.float64)
        levels = np.asarray(self.band_levels, dtype=np.float64)
        if centers.size < 8:
            raise ConfigError(f"envelope needs at least 8 bands, got {centers.size}")
        if centers.size != levels.size:
            raise ConfigError("band_centers and band_levels differ in length")
        if not np.all(np.diff(centers) > 0):
            raise ConfigError("band centers must be strictly increasing")
        if not (np.all(np.isfinite(centers)) and np.all(np.isfinite(levels))):
            raise ConfigError("envelope values must be finite")
        object.__setattr__(self, "band_centers", centers)
        object.__setattr__(self, "band_levels", levels)

    def band_edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Lower/upper band-edge frequencies."""
        return self.band_centers / _EDGE, self.band_centers * _EDGE

    def density_db(self, freqs: np.ndarray) -> np.ndarray:
        """Power-density level at arbitrary frequencies.

        Band levels are integrated powers; dividing out the bandwidth turns
        them into densities, which are then interpolated linearly in
        (log-frequency, dB) and held constant beyond the outermost centers.
        """
        lo, hi = self.band_edges()
        density = self.band_levels - 10.0 * np.log10(hi - lo)
        freqs = np.asarray(freqs, dtype=np.float64)
        out = np.interp(np.log(np.maximum(freqs, 1e-12)),
                        np.log(self.band_centers), density)
        return out

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["center_hz", "level_db"])
            for c, l in zip(self.band_centers, self.band_levels):
                writer.writerow([repr(float(c)), repr(float(l))])

    @classmethod
    def from_csv(cls, path) -> "SpectrumEnvelope":
        centers, levels = [], []
        with open(path, newline="") as fh:
            for row in csv.reader(fh):
                if not row or row[0].strip().lower() == "center_hz":
                    continue
                centers.append(float(row[0]))
                levels.append(float(row[1]))
        return cls(np.array(centers), np.array(levels))


@dataclass(frozen=True)
class NoiseSpec:
    """What noise to produce: kind, presentation level, seed and duration."""

    kind: str
    level_dba: float
    seed: int
    duration: float

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise ConfigError(f"kind must be one of {NOISE_KINDS}, got {self.kind!r}")
        if not 0.0 <= self.level_dba <= 120.0:
            raise ConfigError(f"level {self.level_dba} dBA outside [0, 120]")
        if self.duration <= 0:
            raise ConfigError("duration must be positive")


def _active_seconds(signal: AudioSignal) -> float:
    # 25.6 ms frames at the native rate; mirrors the 256-at-10 kHz criterion.
    frame = max(2, int(round(0.0256 * signal.sample_rate)))
    frames = frame_signal(signal.samples, frame, frame // 2) * hann_window(frame)
    if frames.shape[0] == 0 or np.max(np.abs(signal.samples)) == 0.0:
        return 0.0
    mask = active_frame_mask(frame_energies_db(frames), 40.0)
    return float(np.count_nonzero(mask)) * (frame // 2) / signal.sample_rate


def estimate_ltass(corpus: list[AudioSignal]) -> SpectrumEnvelope:
    """Long-term average spectrum of a corpus as a third-octave envelope.

    Welch periodograms (4096-point Hann segments, 50% overlap) are pooled
    over all signals weighted by segment count, integrated into third-octave
    bands from 125 Hz to 8 kHz, and normalized so the loudest band is 0 dB.
    Bands that lie entirely above Nyquist are dropped.
    """
    if not corpus:
        raise InvalidSignalError("empty corpus")
    rate = corpus[0].sample_rate
    if any(s.sample_rate != rate for s in corpus):
        raise InvalidSignalError("corpus signals must share one sample rate")
    if all(np.max(np.abs(s.samples)) == 0.0 for s in corpus):
        raise InvalidSignalError("corpus is entirely silent")

    active = sum(_active_seconds(s) for s in corpus)
    if active < 10.0:
        warnings.warn(
            f"only {active:.1f} s of active speech; LTASS estimates below 10 s are noisy",
            stacklevel=2,
        )

    nperseg = min(_WELCH_SEGMENT, max(len(s) for s in corpus))
    pooled = None
    total_weight = 0.0
    for s in corpus:
        if len(s) < nperseg:
            continue
        f, pxx = welch(s.samples, fs=rate, window="hann", nperseg=nperseg,
                       noverlap=nperseg // 2)
        weight = 1 + (len(s) - nperseg) // (nperseg // 2)
        pooled = pxx * weight if pooled is None else pooled + pxx * weight
        total_weight += weight
    if pooled is None:
        raise InvalidSignalError("all corpus signals shorter than one analysis segment")
    pooled /= total_weight

    df = f[1] - f[0]
    bin_lo, bin_hi = f - df / 2.0, f + df / 2.0
    centers, levels = [], []
    for center in LTASS_CENTERS:
        lo, hi = center / _EDGE, center * _EDGE
        if lo >= rate / 2:
            break
        overlap = np.clip(np.minimum(bin_hi, hi) - np.maximum(bin_lo, lo), 0.0, None)
        power = float(np.dot(pooled, overlap))
        centers.append(center)
        levels.append(10.0 * np.log10(max(power, 1e-300)))
    levels = np.array(levels)
    return SpectrumEnvelope(np.array(centers), levels - levels.max())


def generate_ssn(envelope: SpectrumEnvelope, spec: NoiseSpec,
                 cal: CalibrationRef = CalibrationRef(),
                 rate: int = 48_000) -> AudioSignal:
    """Stationary Gaussian noise spectrally shaped to the envelope.

    White noise is multiplied in the frequency domain by the envelope's
    interpolated density magnitude, then scaled so the A-weighted level
    matches ``spec.level_dba``. Bit-identical for identical seeds.
    """
    if spec.kind != "ssn":
        raise ConfigError(f"generate_ssn needs kind 'ssn', got {spec.kind!r}")
    rng = np.random.default_rng(spec.seed)
    n = int(round(spec.duration * rate))
    white = rng.standard_normal(n)
    spectrum = np.fft.rfft(white)
    freqs = np.fft.rfftfreq(n, 1.0 / rate)
    gains = 10.0 ** (envelope.density_db(freqs) / 20.0)
    gains[0] = 0.0  # no DC component
    shaped = np.fft.irfft(spectrum * gains, n)
    return scale_to_level(AudioSignal(shaped, rate), spec.level_dba, cal)


def assemble_babble(streams: list[AudioSignal], n_talkers: int, spec: NoiseSpec,
                    cal: CalibrationRef = CalibrationRef(),
                    talker_indices: list[int] | None = None,
                    offsets: list[int] | None = None) -> AudioSignal:
    """Multi-talker babble from source speech streams.

    ``n_talkers`` streams are drawn with replacement and circularly shifted by
    seeded random offsets before summation; the sum is scaled to the requested
    level. ``talker_indices``/``offsets`` override the random draws (mainly
    for tests and controlled stimuli).
    """
    if not streams:
        raise InvalidSignalError("no source streams for babble")
    if n_talkers < 2:
        raise ConfigError(f"babble needs n_talkers >= 2, got {n_talkers}")
    rate = streams[0].sample_rate
    if any(s.sample_rate != rate for s in streams):
        raise InvalidSignalError("babble streams must share one sample rate")

    rng = np.random.default_rng(spec.seed)
    if talker_indices is None:
        talker_indices = rng.integers(0, len(streams), size=n_talkers).tolist()
    if offsets is None:
        offsets = [int(rng.integers(0, len(streams[i]))) for i in talker_indices]

    n = int(round(spec.duration * rate))
    total = np.zeros(n)
    for stream_idx, offset in zip(talker_indices, offsets):
        stream = streams[stream_idx].samples
        total += stream[(np.arange(n) + offset) % stream.size]
    return scale_to_level(AudioSignal(total, rate), spec.level_dba, cal)


def mix_at_levels(speech: AudioSignal, noise: AudioSignal, speech_level: float,
                  noise_level: float,
                  cal: CalibrationRef = CalibrationRef()) -> AudioSignal:
    """Sum speech and noise, each scaled to its own A-weighted level target.

    The SNR of the mixture is ``speech_level - noise_level`` by construction.
    Noise longer than the speech is trimmed to the speech length from its
    start; shorter noise is an error.
    """
    if speech.sample_rate != noise.sample_rate:
        raise InvalidSignalError("speech and noise sample rates differ")
    if len(noise) < len(speech):
        raise InvalidSignalError("noise is shorter than the speech")
    trimmed = AudioSignal(noise.samples[:len(speech)], noise.sample_rate)
    sp = scale_to_level(speech, speech_level, cal)
    nz = scale_to_level(trimmed, noise_level, cal)
    return AudioSignal(sp.samples + nz.samples, speech.sample_rate)
