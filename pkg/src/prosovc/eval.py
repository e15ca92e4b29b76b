"""Objective evaluation: mel-cepstral distortion, F0 RMSE, CER/WER.

Cepstra are orthonormal DCT-II coefficients of the log-mel spectrum with
the energy coefficient excluded, so absolute MCD values are an internal
scale (reported as "MCD (mel-cepstral, internal)") and only relative
comparisons between systems are meaningful. F0 RMSE is computed over
frame pairs voiced on both sides of the DTW path computed on the cepstra
(a frame-synchronous alternative would be possible but is not provided).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.fft import dct
from scipy.spatial.distance import cdist

from .types import MelFeatures

MCD_CONST = 10.0 / math.log(10.0) * math.sqrt(2.0)


def mel_cepstrum(mel: MelFeatures | np.ndarray, order: int = 24) -> np.ndarray:
    """Cepstra of a log-mel sequence, shape (T, order), coefficient 0 dropped."""
    frames = mel.frames if isinstance(mel, MelFeatures) else np.asarray(mel)
    if frames.ndim != 2 or frames.shape[0] == 0:
        raise ValueError("input must be a non-empty (T, D) log-mel matrix")
    if order < 1:
        raise ValueError("cepstral order must be >= 1")
    if order >= frames.shape[1]:
        raise ValueError(f"order {order} needs log-mel dimension > {order}")
    ceps = dct(frames.astype(np.float64), type=2, axis=1, norm="ortho")
    return ceps[:, 1 : order + 1]


class DtwResult(NamedTuple):
    path: np.ndarray  # (P, 2) index pairs, monotone and contiguous
    cost: float  # summed pairwise distance along the path


def dtw_align(reference: np.ndarray, converted: np.ndarray) -> DtwResult:
    """Dynamic time warping on Euclidean frame distance.

    Steps are (1,0), (0,1), (1,1), endpoints anchored. Backtracking ties
    prefer the diagonal, then the vertical step, then the horizontal.
    """
    a = np.atleast_2d(np.asarray(reference, dtype=np.float64))
    b = np.atleast_2d(np.asarray(converted, dtype=np.float64))
    if a.shape[0] == 0 or b.shape[0] == 0:
        raise ValueError("cannot align empty sequences")
    dist = cdist(a, b, metric="euclidean")
    ta, tb = dist.shape
    acc = np.full((ta, tb), np.inf)
    acc[0, 0] = dist[0, 0]
    for j in range(1, tb):
        acc[0, j] = acc[0, j - 1] + dist[0, j]
    for i in range(1, ta):
        acc[i, 0] = acc[i - 1, 0] + dist[i, 0]
        for j in range(1, tb):
            acc[i, j] = dist[i, j] + min(acc[i - 1, j - 1], acc[i - 1, j], acc[i, j - 1])
    path = [(ta - 1, tb - 1)]
    i, j = ta - 1, tb - 1
    while i > 0 or j > 0:
        if i == 0:
            j -= 1
        elif j == 0:
            i -= 1
        else:
            candidates = (acc[i - 1, j - 1], acc[i - 1, j], acc[i, j - 1])
            best = min(candidates)
            if candidates[0] == best:
                i, j = i - 1, j - 1
            elif candidates[1] == best:
                i -= 1
            else:
                j -= 1
        path.append((i, j))
    path.reverse()
    return DtwResult(path=np.asarray(path, dtype=np.int64), cost=float(acc[ta - 1, tb - 1]))


def mcd_along_path(reference: np.ndarray, converted: np.ndarray, path: np.ndarray) -> float:
    diffs = reference[path[:, 0]] - converted[path[:, 1]]
    per_pair = MCD_CONST * np.sqrt(np.sum(diffs**2, axis=1))
    return float(per_pair.mean())


def mcd(reference: np.ndarray, converted: np.ndarray) -> float:
    """DTW-aligned mel-cepstral distortion in dB."""
    ref = np.asarray(reference, dtype=np.float64)
    conv = np.asarray(converted, dtype=np.float64)
    if ref.ndim != 2 or conv.ndim != 2 or ref.shape[0] == 0 or conv.shape[0] == 0:
        raise ValueError("cepstral sequences must be non-empty (T, order) matrices")
    if ref.shape[1] != conv.shape[1]:
        raise ValueError(f"cepstral order mismatch: {ref.shape[1]} vs {conv.shape[1]}")
    result = dtw_align(ref, conv)
    return mcd_along_path(ref, conv, result.path)


@dataclass
class F0Track:
    """Per-frame pitch estimates with voicing flags."""

    f0_hz: np.ndarray
    voiced: np.ndarray

    def __post_init__(self) -> None:
        self.f0_hz = np.asarray(self.f0_hz, dtype=np.float64).reshape(-1)
        self.voiced = np.asarray(self.voiced, dtype=bool).reshape(-1)
        if self.f0_hz.shape != self.voiced.shape:
            raise ValueError("f0 and voicing must have equal length")

    def __len__(self) -> int:
        return int(self.f0_hz.size)


def extract_f0(
    wave: np.ndarray,
    rate: int,
    fmin: float = 60.0,
    fmax: float = 400.0,
    frame_length: int = 1024,
    hop_length: int = 256,
    voicing_threshold: float = 0.3,
    energy_threshold: float = 1e-4,
) -> F0Track:
    """Autocorrelation pitch tracker with parabolic peak refinement.

    Framing mirrors the mel extractor timing (center padding, same hop),
    with zero padding at the edges so no reflected copy can shift the
    autocorrelation peak. A frame is voiced when its normalized (biased)
    autocorrelation peak exceeds voicing_threshold and its RMS exceeds
    energy_threshold; the biased taper keeps the first peak dominant over
    octave multiples.
    """
    if not fmin < fmax:
        raise ValueError("fmin must be < fmax")
    if rate < 2 * fmax:
        raise ValueError(f"sample rate {rate} below 2*fmax={2 * fmax:g}")
    wave = np.asarray(wave, dtype=np.float64)
    if wave.size < frame_length:
        raise ValueError("waveform shorter than one analysis frame")
    min_lag = max(2, int(rate / fmax))
    max_lag = min(frame_length - 2, int(math.ceil(rate / fmin)))
    pad = frame_length // 2
    padded = np.pad(wave, pad, mode="constant")
    n_frames = 1 + wave.shape[0] // hop_length
    view = np.lib.stride_tricks.sliding_window_view(padded, frame_length)[::hop_length][:n_frames]
    f0 = np.zeros(n_frames)
    voiced = np.zeros(n_frames, dtype=bool)
    for t, frame in enumerate(view):
        rms = math.sqrt(float(np.mean(frame**2)))
        if rms <= energy_threshold:
            continue
        full = np.correlate(frame, frame, mode="full")[frame_length - 1 :]
        r0 = full[0]
        if r0 <= 0.0:
            continue
        norm = full[min_lag : max_lag + 1] / r0
        peak = int(np.argmax(norm))
        if norm[peak] < voicing_threshold:
            continue
        lag = float(min_lag + peak)
        if 0 < peak < norm.size - 1:
            lag += _parabolic_offset(norm[peak - 1], norm[peak], norm[peak + 1])
        voiced[t] = True
        f0[t] = rate / lag
    return F0Track(f0_hz=f0, voiced=voiced)


def _parabolic_offset(left: float, center: float, right: float) -> float:
    denom = left - 2.0 * center + right
    if denom == 0.0:
        return 0.0
    offset = 0.5 * (left - right) / denom
    return float(np.clip(offset, -0.5, 0.5))


class F0RmseResult(NamedTuple):
    value: float | None  # None when no frame pair is voiced on both sides
    both_voiced: int


def f0_rmse(reference: F0Track, converted: F0Track, scale: str = "hz") -> F0RmseResult:
    """RMSE over frame pairs voiced in both tracks.

    Tracks must already be aligned (equal length); the evaluation pipeline
    expands them along the cepstral DTW path first. scale="log" compares
    natural-log F0 instead of Hz.
    """
    if len(reference) != len(converted):
        raise ValueError("aligned tracks must have equal length")
    if scale not in ("hz", "log"):
        raise ValueError(f"unknown f0 scale {scale!r}")
    both = reference.voiced & converted.voiced
    n = int(both.sum())
    if n == 0:
        return F0RmseResult(value=None, both_voiced=0)
    ref = reference.f0_hz[both]
    conv = converted.f0_hz[both]
    if scale == "log":
        ref, conv = np.log(ref), np.log(conv)
    return F0RmseResult(value=float(np.sqrt(np.mean((ref - conv) ** 2))), both_voiced=n)


def align_tracks(track: F0Track, indices: np.ndarray) -> F0Track:
    """Expand a track along one column of a DTW path."""
    return F0Track(f0_hz=track.f0_hz[indices], voiced=track.voiced[indices])


def edit_distance(hypothesis: list, reference: list) -> int:
    """Levenshtein distance (insertions + deletions + substitutions)."""
    n, m = len(hypothesis), len(reference)
    prev = list(range(m + 1))
    for i in range(1, n + 1):
        cur = [i] + [0] * m
        hi = hypothesis[i - 1]
        for j in range(1, m + 1):
            cur[j] = min(
                prev[j] + 1,
                cur[j - 1] + 1,
                prev[j - 1] + (0 if hi == reference[j - 1] else 1),
            )
        prev = cur
    return prev[m]


def error_rates(hypothesis: str, reference: str, unit: str = "character") -> float:
    """Edit distance divided by reference length; may exceed 1."""
    if unit not in ("character", "word"):
        raise ValueError(f"unknown unit {unit!r}")
    if unit == "character":
        hyp, ref = list(hypothesis), list(reference)
    else:
        hyp, ref = hypothesis.split(), reference.split()
    if not ref:
        raise ValueError("reference must be non-empty")
    return edit_distance(hyp, ref) / len(ref)


@dataclass
class UtteranceMetrics:
    utterance_id: str
    mcd_db: float | None = None
    f0_rmse: float | None = None
    both_voiced: int = 0
    cer: float | None = None
    wer: float | None = None
    dtw_path_length: int = 0
    ref_frames: int = 0
    conv_frames: int = 0
    error: str | None = None


@dataclass
class MetricReport:
    """Per-utterance metrics plus corpus means (arithmetic, over defined values)."""

    rows: list[UtteranceMetrics] = field(default_factory=list)
    f0_scale: str = "hz"

    def _mean(self, key: str) -> float | None:
        values = [getattr(r, key) for r in self.rows if getattr(r, key) is not None]
        return float(np.mean(values)) if values else None

    @property
    def mean_mcd(self) -> float | None:
        return self._mean("mcd_db")

    @property
    def mean_f0_rmse(self) -> float | None:
        return self._mean("f0_rmse")

    @property
    def mean_cer(self) -> float | None:
        return self._mean("cer")

    @property
    def mean_wer(self) -> float | None:
        return self._mean("wer")

    @property
    def missing(self) -> list[str]:
        return [r.utterance_id for r in self.rows if r.error is not None]

    def to_records(self) -> list[dict]:
        return [
            {
                "utterance_id": r.utterance_id,
                "mcd_db": r.mcd_db,
                "f0_rmse": r.f0_rmse,
                "both_voiced": r.both_voiced,
                "cer": r.cer,
                "wer": r.wer,
                "dtw_path_length": r.dtw_path_length,
                "ref_frames": r.ref_frames,
                "conv_frames": r.conv_frames,
                "error": r.error,
            }
            for r in self.rows
        ]

    def format_table(self) -> str:
        """Human-readable table; columns MCD, F0RMSE, CER, WER in that order."""
        f0_label = "F0RMSE" if self.f0_scale == "hz" else "logF0RMSE"
        header = f"{'utterance':<24}{'MCD (mel-cepstral, internal)':>30}{f0_label:>12}{'CER':>8}{'WER':>8}"
        lines = [header, "-" * len(header)]

        def fmt(v: float | None, nd: int = 3) -> str:
            return "n/a" if v is None else f"{v:.{nd}f}"

        for r in self.rows:
            if r.error is not None:
                lines.append(f"{r.utterance_id:<24}{'(missing: ' + r.error + ')':>30}")
                continue
            lines.append(
                f"{r.utterance_id:<24}{fmt(r.mcd_db):>30}{fmt(r.f0_rmse):>12}{fmt(r.cer):>8}{fmt(r.wer):>8}"
            )
        lines.append("-" * len(header))
        lines.append(
            f"{'mean':<24}{fmt(self.mean_mcd):>30}{fmt(self.mean_f0_rmse):>12}{fmt(self.mean_cer):>8}{fmt(self.mean_wer):>8}"
        )
        return "\n".join(lines)


def select_model(candidates: list[tuple[object, MetricReport]], task_mode: str) -> object:
    """Pick the checkpoint minimizing mean MCD (parallel-reference) or CER
    (no-reference); ties break to the later checkpoint."""
    if not candidates:
        raise ValueError("no checkpoints to select from")
    if task_mode not in ("parallel-reference", "no-reference"):
        raise ValueError(f"unknown task mode {task_mode!r}")
    key = "mean_mcd" if task_mode == "parallel-reference" else "mean_cer"
    best_idx = None
    best_val = None
    for idx, (_, report) in enumerate(candidates):
        val = getattr(report, key)
        if val is None:
            raise ValueError(f"candidate {idx} has no {key} value")
        if best_val is None or val <= best_val:  # <= keeps the later checkpoint on ties
            best_val = val
            best_idx = idx
    return candidates[best_idx][0]
