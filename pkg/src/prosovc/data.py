"""Corpus manifests and dataset-role bundles.

Manifests are JSON lines, one utterance per line, with fields
utterance_id, audio_path, transcript, speaker_id, language. Relative
audio paths are resolved against the manifest's directory at load time.
"""

from __future__ import annotations

import json
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path

from .types import DatasetRole, UtteranceRecord

MANIFEST_FIELDS = ("utterance_id", "audio_path", "transcript", "speaker_id", "language")


class ManifestError(ValueError):
    pass


def load_manifest(path: str | Path) -> list[UtteranceRecord]:
    """Parse a JSONL manifest; rejects malformed lines and duplicate ids."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"manifest not found: {path}")
    records: list[UtteranceRecord] = []
    seen: set[str] = set()
    base = path.parent
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ManifestError(f"{path}:{lineno}: malformed manifest line: {exc}") from exc
            if not isinstance(raw, dict):
                raise ManifestError(f"{path}:{lineno}: manifest line is not an object")
            missing = [k for k in MANIFEST_FIELDS if k not in raw and k != "language"]
            if missing:
                raise ManifestError(f"{path}:{lineno}: missing fields {missing}")
            utt_id = str(raw["utterance_id"])
            if utt_id in seen:
                raise ManifestError(f"{path}:{lineno}: duplicate utterance_id {utt_id!r}")
            seen.add(utt_id)
            audio = Path(str(raw["audio_path"]))
            if not audio.is_absolute():
                audio = base / audio
            records.append(
                UtteranceRecord(
                    utterance_id=utt_id,
                    audio_path=str(audio),
                    transcript=str(raw["transcript"]),
                    speaker_id=str(raw["speaker_id"]),
                    language=str(raw.get("language", "en")),
                )
            )
    return records


def save_manifest(records: Iterable[UtteranceRecord], path: str | Path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(
                json.dumps(
                    {
                        "utterance_id": rec.utterance_id,
                        "audio_path": rec.audio_path,
                        "transcript": rec.transcript,
                        "speaker_id": rec.speaker_id,
                        "language": rec.language,
                    },
                    sort_keys=True,
                )
                + "\n"
            )


@dataclass
class DatasetBundle:
    """Role-partitioned view of one experiment's corpora."""

    by_role: dict[DatasetRole, list[UtteranceRecord]] = field(default_factory=dict)
    target_speaker_id: str | None = None

    def records(self, role: DatasetRole) -> list[UtteranceRecord]:
        return self.by_role.get(role, [])

    def speakers(self, role: DatasetRole) -> list[str]:
        return sorted({r.speaker_id for r in self.records(role)})

    def all_records(self) -> list[UtteranceRecord]:
        out: list[UtteranceRecord] = []
        for role in DatasetRole:
            out.extend(self.records(role))
        return out


def split_roles(manifests: Mapping[DatasetRole, Sequence[UtteranceRecord]]) -> DatasetBundle:
    """Validate role-tagged manifests and build the experiment bundle.

    The target fine-tune corpus must contain exactly one speaker, whose id
    is recorded for conditioning; the pretrain corpus must be non-empty.
    """
    bundle = DatasetBundle(by_role={role: list(recs) for role, recs in manifests.items()})
    pretrain = bundle.records(DatasetRole.TTS_PRETRAIN)
    if not pretrain:
        raise ManifestError("tts pretrain corpus is empty")
    target = bundle.records(DatasetRole.TARGET_FINETUNE)
    if target:
        speakers = bundle.speakers(DatasetRole.TARGET_FINETUNE)
        if len(speakers) != 1:
            raise ManifestError(f"target fine-tune corpus must have exactly one speaker, got {speakers}")
        bundle.target_speaker_id = speakers[0]
    return bundle
