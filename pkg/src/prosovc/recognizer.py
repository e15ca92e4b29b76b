"""Speaker-independent recognizer: maps source speech to content symbols.

Two desk-scale representation modes:
  - text: oracle transcript lookup through a fixed character table. The
    output depends on the transcript string only, never on audio or
    speaker, which is what makes downstream text prediction speaker-safe.
  - frame-code: per-frame nearest-centroid quantization against a k-means
    codebook trained on corpus log-mels (stand-in for pretrained
    self-supervised quantizers).
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np
from sklearn.cluster import KMeans

from .types import ContentKind, ContentSequence, MelFeatures, UtteranceRecord

_WHITESPACE = re.compile(r"\s+")


class RecognitionError(ValueError):
    pass


def normalize_text(text: str) -> str:
    """Lowercase and collapse repeated whitespace."""
    return _WHITESPACE.sub(" ", text.lower()).strip()


class Charset:
    """Immutable character table mapping symbols to contiguous ids."""

    def __init__(self, symbols: tuple[str, ...] | list[str]):
        symbols = tuple(symbols)
        if len(set(symbols)) != len(symbols):
            raise ValueError("charset symbols must be unique")
        if not symbols:
            raise ValueError("charset must be non-empty")
        self.symbols = symbols
        self._index = {s: i for i, s in enumerate(symbols)}

    def __len__(self) -> int:
        return len(self.symbols)

    def __contains__(self, ch: str) -> bool:
        return ch in self._index

    def index(self, ch: str) -> int:
        return self._index[ch]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Charset) and other.symbols == self.symbols


def build_charset(transcripts: list[str] | tuple[str, ...]) -> Charset:
    chars: set[str] = set()
    for t in transcripts:
        chars.update(normalize_text(t))
    return Charset(tuple(sorted(chars)))


def recognize_text(record: UtteranceRecord, charset: Charset) -> ContentSequence:
    """Oracle text recognition: normalized transcript through the charset."""
    text = normalize_text(record.transcript)
    if not text:
        raise RecognitionError(f"utterance {record.utterance_id!r} has an empty transcript")
    ids = []
    for ch in text:
        if ch not in charset:
            raise RecognitionError(f"character {ch!r} not in charset (utterance {record.utterance_id!r})")
        ids.append(charset.index(ch))
    return ContentSequence(
        kind=ContentKind.TEXT,
        symbols=np.asarray(ids, dtype=np.int64),
        vocabulary_size=len(charset),
        frame_aligned=False,
    )


def inject_recognition_noise(seq: ContentSequence, rate: float, rng: np.random.Generator) -> ContentSequence:
    """Random symbol substitutions at the given rate, to probe robustness."""
    if not 0.0 <= rate <= 1.0:
        raise ValueError("noise rate must be in [0, 1]")
    symbols = seq.symbols.copy()
    if rate > 0.0 and symbols.size:
        flip = rng.random(symbols.size) < rate
        symbols[flip] = rng.integers(0, seq.vocabulary_size, size=int(flip.sum()))
    return ContentSequence(
        kind=seq.kind,
        symbols=symbols,
        vocabulary_size=seq.vocabulary_size,
        frame_aligned=seq.frame_aligned,
    )


@dataclass
class FrameCodebook:
    """K-means centroids used for framewise quantization."""

    centroids: np.ndarray  # (K, D)
    training_corpus_id: str = ""

    def __post_init__(self) -> None:
        self.centroids = np.asarray(self.centroids, dtype=np.float64)
        if self.centroids.ndim != 2 or self.centroids.shape[0] < 2:
            raise ValueError("codebook needs at least 2 centroids")
        uniq = np.unique(self.centroids, axis=0)
        if uniq.shape[0] != self.centroids.shape[0]:
            raise ValueError("codebook centroids must be pairwise distinct")

    @property
    def k_codes(self) -> int:
        return self.centroids.shape[0]

    @property
    def dim(self) -> int:
        return self.centroids.shape[1]


def train_codebook(
    corpus: list[MelFeatures] | list[np.ndarray],
    k_codes: int,
    seed: int,
    training_corpus_id: str = "",
) -> FrameCodebook:
    """Fit k-means centroids on all corpus frames; deterministic given seed."""
    if k_codes < 2:
        raise ValueError("k_codes must be >= 2")
    mats = [m.frames if isinstance(m, MelFeatures) else np.asarray(m) for m in corpus]
    if not mats:
        raise ValueError("empty corpus")
    frames = np.concatenate(mats, axis=0).astype(np.float64)
    if frames.shape[0] < k_codes:
        raise ValueError(f"corpus has {frames.shape[0]} frames < k_codes={k_codes}")
    km = KMeans(n_clusters=k_codes, n_init=4, random_state=seed).fit(frames)
    return FrameCodebook(centroids=km.cluster_centers_, training_corpus_id=training_corpus_id)


def extract_frame_codes(mel: MelFeatures, codebook: FrameCodebook) -> ContentSequence:
    """Nearest-centroid code per frame; ties break to the lowest index."""
    if mel.dim != codebook.dim:
        raise ValueError(f"mel dim {mel.dim} != codebook dim {codebook.dim}")
    frames = np.asarray(mel.frames, dtype=np.float64)
    diffs = frames[:, None, :] - codebook.centroids[None, :, :]
    dists = np.einsum("tkd,tkd->tk", diffs, diffs)
    codes = np.argmin(dists, axis=1)  # argmin returns the first (lowest) index on ties
    return ContentSequence(
        kind=ContentKind.FRAME_CODE,
        symbols=codes.astype(np.int64),
        vocabulary_size=codebook.k_codes,
        frame_aligned=True,
    )
