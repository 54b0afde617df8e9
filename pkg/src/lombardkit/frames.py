"""Short-time framing helpers shared by the silence criterion and energy measures.

All functions operate on plain 1-D float arrays. The window is the
endpoint-free Hann window so that no frame sample is multiplied by zero and
50%-overlapped frames reconstruct the signal by plain overlap-add.
"""

import numpy as np

_EPS = np.finfo(np.float64).eps


def hann_window(length: int) -> np.ndarray:
    """Hann window with the zero endpoints dropped (all samples > 0)."""
    return np.hanning(length + 2)[1:-1]


def frame_signal(x: np.ndarray, frame_len: int, hop: int) -> np.ndarray:
    """Slice ``x`` into overlapping frames, shape (n_frames, frame_len).

    Trailing samples that do not fill a whole frame are dropped. Returns an
    empty (0, frame_len) array when the signal is shorter than one frame.
    """
    n_frames = 1 + (len(x) - frame_len) // hop if len(x) >= frame_len else 0
    idx = hop * np.arange(n_frames)[:, None] + np.arange(frame_len)[None, :]
    return x[idx] if n_frames else np.empty((0, frame_len), dtype=x.dtype)


def frame_energies_db(windowed_frames: np.ndarray) -> np.ndarray:
    """Per-frame energy in dB (20*log10 of the windowed frame norm)."""
    return 20.0 * np.log10(np.linalg.norm(windowed_frames, axis=1) + _EPS)


def active_frame_mask(energies_db: np.ndarray, dynamic_range_db: float) -> np.ndarray:
    """Frames within ``dynamic_range_db`` of the loudest frame."""
    return energies_db > energies_db.max() - dynamic_range_db


def overlap_add(frames: np.ndarray, hop: int) -> np.ndarray:
    """Reassemble (already windowed) frames by overlap-add."""
    n_frames, frame_len = frames.shape
    out = np.zeros((n_frames - 1) * hop + frame_len)
    idx = hop * np.arange(n_frames)[:, None] + np.arange(frame_len)[None, :]
    np.add.at(out, idx, frames)
    return out
