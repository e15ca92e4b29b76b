"""Shared data types for the voice conversion pipeline."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
import torch


class DatasetRole(str, Enum):
    """Role a manifest plays inside one experiment."""

    ASR_CORPUS = "asr-corpus"
    TTS_PRETRAIN = "tts-pretrain-corpus"
    TARGET_FINETUNE = "target-finetune-corpus"
    SOURCE_EVAL = "source-eval"


class ContentKind(str, Enum):
    TEXT = "text"
    FRAME_CODE = "frame-code"


@dataclass(frozen=True)
class UtteranceRecord:
    """One manifest line: a single utterance and its metadata."""

    utterance_id: str
    audio_path: str
    transcript: str  # may be empty for unlabeled audio
    speaker_id: str
    language: str = "en"


@dataclass
class MelFeatures:
    """Log-mel energy matrix, shape (T, D)."""

    frames: np.ndarray
    frame_shift_ms: float
    sample_rate: int

    def __post_init__(self) -> None:
        self.frames = np.asarray(self.frames)
        if self.frames.ndim != 2 or self.frames.shape[0] < 1:
            raise ValueError(f"mel frames must be (T>=1, D), got {self.frames.shape}")
        if not np.all(np.isfinite(self.frames)):
            raise ValueError("mel frames contain non-finite values")

    @property
    def n_frames(self) -> int:
        return self.frames.shape[0]

    @property
    def dim(self) -> int:
        return self.frames.shape[1]


@dataclass
class ContentSequence:
    """Recognizer output: identity-discarded linguistic symbols."""

    kind: ContentKind
    symbols: np.ndarray  # (L,) integer ids
    vocabulary_size: int
    frame_aligned: bool

    def __post_init__(self) -> None:
        self.symbols = np.asarray(self.symbols, dtype=np.int64)
        if self.symbols.ndim != 1:
            raise ValueError("content symbols must be a 1-D id sequence")
        if self.symbols.size and (self.symbols.min() < 0 or self.symbols.max() >= self.vocabulary_size):
            raise ValueError("content symbol id outside vocabulary")
        if self.frame_aligned and self.kind is not ContentKind.FRAME_CODE:
            raise ValueError("only frame-code sequences are frame aligned")

    def __len__(self) -> int:
        return int(self.symbols.size)


SIMPLEX_TOL = 1e-6


@dataclass
class StyleEmbedding:
    """Global prosody vector; weights present iff produced by style attention."""

    vector: np.ndarray  # (E,)
    weights: np.ndarray | None = None  # (K,) simplex, absent for direct prediction

    def __post_init__(self) -> None:
        self.vector = np.asarray(self.vector, dtype=np.float32).reshape(-1)
        if not np.all(np.isfinite(self.vector)):
            raise ValueError("style vector contains non-finite values")
        if self.weights is not None:
            self.weights = np.asarray(self.weights, dtype=np.float32).reshape(-1)
            if np.any(self.weights < -SIMPLEX_TOL):
                raise ValueError("style weights must be nonnegative")
            if abs(float(self.weights.sum()) - 1.0) > SIMPLEX_TOL:
                raise ValueError("style weights must sum to 1")

    @property
    def dim(self) -> int:
        return self.vector.shape[0]


@dataclass
class SpeakerEmbedding:
    """Per-speaker conditioning vector from the learned lookup table."""

    vector: np.ndarray
    speaker_id: str

    def __post_init__(self) -> None:
        self.vector = np.asarray(self.vector, dtype=np.float32).reshape(-1)
        if not np.all(np.isfinite(self.vector)):
            raise ValueError("speaker vector contains non-finite values")


@dataclass
class EncoderStates:
    """Content encoder hidden states, shape (L, H)."""

    states: torch.Tensor

    def __post_init__(self) -> None:
        if self.states.dim() != 2:
            raise ValueError("encoder states must be (L, H)")

    @property
    def length(self) -> int:
        return self.states.shape[0]


@dataclass
class SynthOutput:
    """Decoded synthesizer output for one utterance."""

    mel: MelFeatures
    stop_probabilities: np.ndarray  # (T,) in [0, 1]
    attention: np.ndarray  # (T, L), rows sum to 1
    truncated: bool = False
