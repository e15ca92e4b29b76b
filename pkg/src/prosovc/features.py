"""Waveform IO and log-mel feature extraction.

Framing uses center padding (reflection, half an FFT window on each side),
so the frame count is T = 1 + floor(n_samples / hop) for any waveform at
least one window long.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.io import wavfile
from scipy.signal import get_window, resample_poly

from .types import MelFeatures

LOG_FLOOR_DEFAULT = 1e-10


@dataclass(frozen=True)
class FeatureConfig:
    sample_rate: int = 16000
    n_fft: int = 1024
    hop_length: int = 256
    n_mels: int = 80
    fmin: float = 0.0
    fmax: float | None = None  # None -> Nyquist
    log_floor: float = LOG_FLOOR_DEFAULT

    @property
    def frame_shift_ms(self) -> float:
        return 1000.0 * self.hop_length / self.sample_rate

    @property
    def effective_fmax(self) -> float:
        return self.fmax if self.fmax is not None else self.sample_rate / 2.0


def load_waveform(path: str | Path, target_rate: int | None = None) -> tuple[np.ndarray, int]:
    """Read a wav file as mono float64 in [-1, 1], resampling if asked.

    Integer PCM is scaled by its type range; multi-channel audio is
    averaged to mono.
    """
    rate, data = wavfile.read(str(path))
    data = np.asarray(data)
    if data.dtype.kind == "i":
        data = data.astype(np.float64) / float(np.iinfo(data.dtype).max)
    elif data.dtype.kind == "u":  # 8-bit wav is unsigned
        data = (data.astype(np.float64) - 128.0) / 128.0
    else:
        data = data.astype(np.float64)
    if data.ndim == 2:
        data = data.mean(axis=1)
    if target_rate is not None and rate != target_rate:
        data = resample(data, rate, target_rate)
        rate = target_rate
    return data, rate


def save_waveform(path: str | Path, wave: np.ndarray, rate: int) -> None:
    """Write float audio as 16-bit PCM, clipping to [-1, 1]."""
    clipped = np.clip(np.asarray(wave, dtype=np.float64), -1.0, 1.0)
    wavfile.write(str(path), rate, (clipped * 32767.0).astype(np.int16))


def resample(wave: np.ndarray, orig_rate: int, target_rate: int) -> np.ndarray:
    if orig_rate == target_rate:
        return wave
    g = math.gcd(orig_rate, target_rate)
    return resample_poly(wave, target_rate // g, orig_rate // g)


def frame_count(n_samples: int, config: FeatureConfig) -> int:
    """Frames produced by extract_mel for a waveform of n_samples."""
    return 1 + n_samples // config.hop_length


def mel_scale(hz: np.ndarray | float) -> np.ndarray:
    return 2595.0 * np.log10(1.0 + np.asarray(hz, dtype=np.float64) / 700.0)


def mel_to_hz(mel: np.ndarray | float) -> np.ndarray:
    return 700.0 * (10.0 ** (np.asarray(mel, dtype=np.float64) / 2595.0) - 1.0)


def mel_filterbank(config: FeatureConfig) -> np.ndarray:
    """Triangular mel filters (peak 1.0), shape (n_mels, n_fft // 2 + 1)."""
    n_bins = config.n_fft // 2 + 1
    fft_freqs = np.linspace(0.0, config.sample_rate / 2.0, n_bins)
    mel_points = np.linspace(mel_scale(config.fmin), mel_scale(config.effective_fmax), config.n_mels + 2)
    hz_points = mel_to_hz(mel_points)
    bank = np.zeros((config.n_mels, n_bins), dtype=np.float64)
    for m in range(config.n_mels):
        left, center, right = hz_points[m], hz_points[m + 1], hz_points[m + 2]
        up = (fft_freqs - left) / max(center - left, 1e-12)
        down = (right - fft_freqs) / max(right - center, 1e-12)
        bank[m] = np.maximum(0.0, np.minimum(up, down))
    return bank


def _frames(wave: np.ndarray, config: FeatureConfig) -> np.ndarray:
    pad = config.n_fft // 2
    padded = np.pad(wave, pad, mode="reflect")
    n = 1 + wave.shape[0] // config.hop_length
    view = np.lib.stride_tricks.sliding_window_view(padded, config.n_fft)
    return view[:: config.hop_length][:n]


def extract_mel(wave: np.ndarray, rate: int, config: FeatureConfig) -> MelFeatures:
    """Log-mel features of a mono waveform.

    Power is clamped to config.log_floor before the natural log, so pure
    silence comes out at log(log_floor) in every bin.
    """
    wave = np.asarray(wave, dtype=np.float64)
    if wave.ndim != 1 or wave.size == 0:
        raise ValueError("waveform must be a non-empty 1-D array")
    if rate != config.sample_rate:
        raise ValueError(f"waveform rate {rate} != configured {config.sample_rate}; resample at ingestion")
    if wave.shape[0] < config.n_fft:
        raise ValueError(f"waveform shorter than one analysis window ({wave.shape[0]} < {config.n_fft})")
    window = get_window("hann", config.n_fft, fftbins=True)
    frames = _frames(wave, config) * window
    power = np.abs(np.fft.rfft(frames, axis=1)) ** 2
    mel_power = power @ mel_filterbank(config).T
    logmel = np.log(np.maximum(mel_power, config.log_floor))
    return MelFeatures(
        frames=logmel.astype(np.float32),
        frame_shift_ms=config.frame_shift_ms,
        sample_rate=config.sample_rate,
    )


def invert_mel(mel: MelFeatures, config: FeatureConfig, n_iters: int = 32) -> np.ndarray:
    """Deterministic Griffin-Lim style inversion of log-mel features.

    Audibility utility only; zero-phase initialization, fixed iteration
    count, no randomness. Not part of any metric contract except the
    symmetric F0 path in evaluation.
    """
    bank = mel_filterbank(config)
    mel_power = np.exp(np.asarray(mel.frames, dtype=np.float64))
    linear_power = np.maximum(mel_power @ np.linalg.pinv(bank).T, 0.0)
    magnitude = np.sqrt(linear_power)
    window = get_window("hann", config.n_fft, fftbins=True)
    angles = np.zeros_like(magnitude)
    spec = magnitude * np.exp(1j * angles)
    for _ in range(max(1, n_iters)):
        wave = _overlap_add(np.fft.irfft(spec, n=config.n_fft, axis=1), window, config.hop_length)
        frames = _frames_from_padded(wave, config) * window
        rebuilt = np.fft.rfft(frames[: magnitude.shape[0]], axis=1)
        phase = rebuilt / np.maximum(np.abs(rebuilt), 1e-12)
        spec = magnitude * phase
    wave = _overlap_add(np.fft.irfft(spec, n=config.n_fft, axis=1), window, config.hop_length)
    pad = config.n_fft // 2
    return wave[pad : pad + (mel.n_frames - 1) * config.hop_length + 1]


def _overlap_add(frames: np.ndarray, window: np.ndarray, hop: int) -> np.ndarray:
    n_frames, n_fft = frames.shape
    length = n_fft + hop * (n_frames - 1)
    wave = np.zeros(length)
    norm = np.zeros(length)
    wsq = window**2
    for t in range(n_frames):
        wave[t * hop : t * hop + n_fft] += frames[t] * window
        norm[t * hop : t * hop + n_fft] += wsq
    return wave / np.maximum(norm, 1e-8)


def _frames_from_padded(padded: np.ndarray, config: FeatureConfig) -> np.ndarray:
    view = np.lib.stride_tricks.sliding_window_view(padded, config.n_fft)
    return view[:: config.hop_length]
