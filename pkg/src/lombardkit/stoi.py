"""Short-time objective intelligibility between a clean reference and a degraded signal.

The score is the mean, over one-third-octave bands and 384 ms segments, of
the correlation between short-time band envelopes of the clean and the
(normalized, clipped) degraded signal. Both signals are brought to a 10 kHz
working rate and frames in which the clean signal is effectively silent are
excised before analysis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .audio import AudioSignal, resample
from .errors import ConfigError, InvalidSignalError
from .frames import (
    active_frame_mask,
    frame_energies_db,
    frame_signal,
    hann_window,
    overlap_add,
)

_EPS = np.finfo(np.float64).eps


@dataclass(frozen=True)
class StoiConfig:
    """Analysis constants. The defaults are the standard published set; changing
    them breaks comparability with published scores."""

    work_rate: int = 10_000
    frame_len: int = 256
    fft_len: int = 512
    n_bands: int = 15
    lowest_center: float = 150.0
    seg_frames: int = 30
    clip_db: float = -15.0
    silence_range_db: float = 40.0

    def __post_init__(self):
        if self.frame_len > self.fft_len:
            raise ConfigError("frame_len must not exceed fft_len")
        if self.n_bands < 1 or self.seg_frames < 2:
            raise ConfigError("need n_bands >= 1 and seg_frames >= 2")
        if min(self.work_rate, self.frame_len, self.fft_len,
               self.lowest_center, self.silence_range_db) <= 0:
            raise ConfigError("all sizes, rates and ranges must be positive")

    @property
    def hop(self) -> int:
        return self.frame_len // 2


@dataclass(frozen=True)
class StoiScore:
    """Correlation-based intelligibility score, practically in [0, 1]."""

    d: float

    def __post_init__(self):
        if not np.isfinite(self.d):
            raise InvalidSignalError("score must be finite")
        if abs(self.d) > 1.0 + 1e-9:
            raise InvalidSignalError(f"score magnitude {self.d} exceeds 1")


def remove_silent_frames(clean: AudioSignal, degraded: AudioSignal,
                         cfg: StoiConfig = StoiConfig()) -> tuple[AudioSignal, AudioSignal]:
    """Excise frames where the CLEAN signal is silent from both signals.

    A frame is silent when its Hann-windowed energy lies more than
    ``cfg.silence_range_db`` below the loudest clean frame. The kept frames
    are reassembled by overlap-add.
    """
    if clean.sample_rate != degraded.sample_rate:
        raise InvalidSignalError("sample rates differ")
    if len(clean) != len(degraded):
        raise InvalidSignalError("lengths differ")
    if np.max(np.abs(clean.samples)) == 0.0:
        raise InvalidSignalError("clean signal is pure silence")

    window = hann_window(cfg.frame_len)
    clean_frames = frame_signal(clean.samples, cfg.frame_len, cfg.hop) * window
    degraded_frames = frame_signal(degraded.samples, cfg.frame_len, cfg.hop) * window
    if clean_frames.shape[0] == 0:
        raise InvalidSignalError("signal shorter than one frame")

    mask = active_frame_mask(frame_energies_db(clean_frames), cfg.silence_range_db)
    rate = clean.sample_rate
    return (
        AudioSignal(overlap_add(clean_frames[mask], cfg.hop), rate),
        AudioSignal(overlap_add(degraded_frames[mask], cfg.hop), rate),
    )


def third_octave_bank(cfg: StoiConfig = StoiConfig()) -> np.ndarray:
    """Rectangular 0/1 matrix grouping FFT bins into one-third-octave bands.

    Band k is centered at ``lowest_center * 2**(k/3)`` and spans one third of
    an octave; each rfft bin belongs to at most one band (edges are snapped to
    the nearest bin, and adjacent bands share their edge frequency).
    """
    k = np.arange(cfg.n_bands)
    centers = cfg.lowest_center * 2.0 ** (k / 3.0)
    f_low = centers / 2.0 ** (1.0 / 6.0)
    f_high = centers * 2.0 ** (1.0 / 6.0)
    if f_high[-1] > cfg.work_rate / 2:
        raise ConfigError(
            f"highest band edge {f_high[-1]:.0f} Hz exceeds Nyquist at {cfg.work_rate} Hz"
        )
    bin_freqs = np.arange(cfg.fft_len // 2 + 1) * (cfg.work_rate / cfg.fft_len)
    bank = np.zeros((cfg.n_bands, bin_freqs.size))
    for i in range(cfg.n_bands):
        lo = int(np.argmin(np.square(bin_freqs - f_low[i])))
        hi = int(np.argmin(np.square(bin_freqs - f_high[i])))
        bank[i, lo:hi] = 1.0
    return bank


def _band_envelopes(x: np.ndarray, cfg: StoiConfig, bank: np.ndarray) -> np.ndarray:
    frames = frame_signal(x, cfg.frame_len, cfg.hop) * hann_window(cfg.frame_len)
    spectra = np.fft.rfft(frames, n=cfg.fft_len, axis=1)
    return np.sqrt(bank @ np.square(np.abs(spectra)).T)  # (n_bands, n_frames)


def stoi(clean: AudioSignal, degraded: AudioSignal,
         cfg: StoiConfig = StoiConfig()) -> StoiScore:
    """Intelligibility score of ``degraded`` given the clean reference.

    Both signals are resampled to the working rate, trimmed to the shorter
    (mismatch beyond 5% is rejected as a likely mispairing), stripped of
    silent frames, then analyzed in one-third-octave band envelopes: within
    every 30-frame segment the degraded envelope is energy-normalized to the
    clean one, clipped at ``clip_db`` below it, and correlated against it.
    The score is the mean correlation over all bands and segments.
    """
    if clean.sample_rate != degraded.sample_rate:
        raise InvalidSignalError("clean and degraded sample rates differ")
    clean = resample(clean, cfg.work_rate)
    degraded = resample(degraded, cfg.work_rate)

    n_clean, n_deg = len(clean), len(degraded)
    if abs(n_clean - n_deg) > 0.05 * max(n_clean, n_deg):
        raise InvalidSignalError(
            f"length mismatch {n_clean} vs {n_deg} exceeds 5%: likely mispaired files"
        )
    n = min(n_clean, n_deg)
    clean = AudioSignal(clean.samples[:n], cfg.work_rate)
    degraded = AudioSignal(degraded.samples[:n], cfg.work_rate)

    clean, degraded = remove_silent_frames(clean, degraded, cfg)

    bank = third_octave_bank(cfg)
    x = _band_envelopes(clean.samples, cfg, bank)
    y = _band_envelopes(degraded.samples, cfg, bank)

    n_frames = x.shape[1]
    if n_frames < cfg.seg_frames:
        raise InvalidSignalError(
            f"only {n_frames} frames after silence removal; need {cfg.seg_frames}"
        )

    # (n_bands, n_segments, seg_frames) sliding segments.
    x_seg = np.lib.stride_tricks.sliding_window_view(x, cfg.seg_frames, axis=1)
    y_seg = np.lib.stride_tricks.sliding_window_view(y, cfg.seg_frames, axis=1)

    alpha = np.linalg.norm(x_seg, axis=2, keepdims=True) / (
        np.linalg.norm(y_seg, axis=2, keepdims=True) + _EPS
    )
    clip_bound = x_seg * (1.0 + 10.0 ** (-cfg.clip_db / 20.0))
    y_prime = np.minimum(alpha * y_seg, clip_bound)

    xc = x_seg - np.mean(x_seg, axis=2, keepdims=True)
    yc = y_prime - np.mean(y_prime, axis=2, keepdims=True)
    corr = np.sum(xc * yc, axis=2) / (
        np.linalg.norm(xc, axis=2) * np.linalg.norm(yc, axis=2) + _EPS
    )
    return StoiScore(float(np.mean(corr)))
