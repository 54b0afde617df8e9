"""Corpus manifests: which WAV belongs to which speaker, noise type and level.

A manifest row is (speaker_id, noise_type, level_dba, sentence_id, path).
Relative paths resolve against the manifest file's directory so a corpus can
be moved as a unit. Validation aggregates every defect instead of stopping
at the first, because fixing a 4000-file corpus one error at a time is cruel.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

from .audio import read_wav
from .errors import ManifestError

DEFAULT_LADDER = tuple(float(v) for v in range(30, 85, 5))

_NOISE_TYPES = ("ssn", "babble")


@dataclass(frozen=True)
class ManifestEntry:
    """One recorded sentence at one (noise type, level) condition."""

    speaker_id: str
    noise_type: str
    level_dba: float
    sentence_id: str
    path: str

    def __post_init__(self):
        kind = self.noise_type.strip().lower()
        if kind not in _NOISE_TYPES:
            raise ManifestError(
                f"noise_type must be one of {_NOISE_TYPES}, got {self.noise_type!r}")
        object.__setattr__(self, "noise_type", kind)
        if not self.speaker_id or not self.sentence_id or not self.path:
            raise ManifestError("speaker_id, sentence_id and path must be non-empty")


@dataclass(frozen=True)
class CorpusManifest:
    """All entries of a corpus plus the level ladder they were recorded on."""

    entries: tuple[ManifestEntry, ...]
    ladder: tuple[float, ...] = DEFAULT_LADDER
    root: Path | None = None

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        ladder = tuple(float(v) for v in self.ladder)
        if len(ladder) < 2:
            raise ManifestError("ladder needs at least 2 levels")
        if any(b <= a for a, b in zip(ladder, ladder[1:])):
            raise ManifestError("ladder must be strictly ascending")
        object.__setattr__(self, "ladder", ladder)
        if self.root is not None:
            object.__setattr__(self, "root", Path(self.root))

    def resolve(self, entry: ManifestEntry) -> Path:
        p = Path(entry.path)
        if not p.is_absolute() and self.root is not None:
            p = self.root / p
        return p

    def speakers(self, noise_type: str | None = None) -> list[str]:
        return sorted({e.speaker_id for e in self.entries
                       if noise_type is None or e.noise_type == noise_type})

    def sentences(self, noise_type: str, level: float) -> list[str]:
        return sorted({e.sentence_id for e in self.entries
                       if e.noise_type == noise_type and e.level_dba == level})

    def levels(self, noise_type: str) -> list[float]:
        return sorted({e.level_dba for e in self.entries
                       if e.noise_type == noise_type})

    def lookup(self, speaker_id: str, noise_type: str, level: float,
               sentence_id: str) -> ManifestEntry:
        for e in self.entries:
            if (e.speaker_id == speaker_id and e.noise_type == noise_type
                    and e.level_dba == level and e.sentence_id == sentence_id):
                return e
        raise ManifestError(
            f"no entry for speaker={speaker_id} noise={noise_type} "
            f"level={level} sentence={sentence_id}")

    def condition(self, noise_type: str, level: float) -> dict[tuple[str, str], ManifestEntry]:
        """Entries of one (noise type, level) keyed by (speaker, sentence)."""
        out: dict[tuple[str, str], ManifestEntry] = {}
        for e in self.entries:
            if e.noise_type == noise_type and e.level_dba == level:
                out[(e.speaker_id, e.sentence_id)] = e
        return out

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["speaker_id", "noise_type", "level_dba",
                             "sentence_id", "path"])
            for e in self.entries:
                writer.writerow([e.speaker_id, e.noise_type, repr(e.level_dba),
                                 e.sentence_id, e.path])

    @classmethod
    def from_csv(cls, path, ladder: tuple[float, ...] = DEFAULT_LADDER) -> "CorpusManifest":
        path = Path(path)
        entries = []
        try:
            with open(path, newline="") as fh:
                reader = csv.reader(fh)
                for i, row in enumerate(reader):
                    if not row or (i == 0 and row[0].strip().lower() == "speaker_id"):
                        continue
                    if len(row) != 5:
                        raise ManifestError(f"{path}:{i + 1}: expected 5 columns, got {len(row)}")
                    entries.append(ManifestEntry(row[0], row[1], float(row[2]),
                                                 row[3], row[4]))
        except OSError as exc:
            raise ManifestError(f"cannot read manifest {path}: {exc}") from exc
        return cls(tuple(entries), ladder=ladder, root=path.parent)

    def to_json(self, path) -> None:
        data = {
            "ladder": list(self.ladder),
            "entries": [{"speaker_id": e.speaker_id, "noise_type": e.noise_type,
                         "level_dba": e.level_dba, "sentence_id": e.sentence_id,
                         "path": e.path} for e in self.entries],
        }
        with open(path, "w") as fh:
            json.dump(data, fh, indent=2)
            fh.write("\n")

    @classmethod
    def from_json(cls, path) -> "CorpusManifest":
        path = Path(path)
        try:
            with open(path) as fh:
                data = json.load(fh)
            entries = tuple(ManifestEntry(r["speaker_id"], r["noise_type"],
                                          float(r["level_dba"]), r["sentence_id"],
                                          r["path"])
                            for r in data["entries"])
            ladder = tuple(data.get("ladder", DEFAULT_LADDER))
        except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
            raise ManifestError(f"cannot read manifest {path}: {exc}") from exc
        return cls(entries, ladder=ladder, root=path.parent)


@dataclass(frozen=True)
class ValidationReport:
    """Aggregated manifest defects; empty defect list means a usable corpus."""

    n_entries: int
    defects: tuple[str, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.defects

    def __str__(self) -> str:
        head = f"{self.n_entries} entries, {len(self.defects)} defects"
        return head if self.ok else head + "\n" + "\n".join(
            f"  - {d}" for d in self.defects)


def validate_manifest(manifest: CorpusManifest, check_audio: bool = True) -> ValidationReport:
    """Check completeness, duplicates, file existence and decodability.

    Completeness means: within each (noise_type, level) condition present in
    the manifest, every speaker carries the same sentence set. All defects
    are collected; nothing fails fast.
    """
    defects: list[str] = []
    if not manifest.entries:
        return ValidationReport(0, ("manifest has no entries",))

    seen: dict[tuple, ManifestEntry] = {}
    for e in manifest.entries:
        key = (e.speaker_id, e.noise_type, e.level_dba, e.sentence_id)
        if key in seen:
            defects.append(f"duplicate entry: speaker={e.speaker_id} "
                           f"noise={e.noise_type} level={e.level_dba} "
                           f"sentence={e.sentence_id}")
        seen[key] = e

    for noise_type in sorted({e.noise_type for e in manifest.entries}):
        for level in manifest.levels(noise_type):
            cond = manifest.condition(noise_type, level)
            all_sentences = {s for _, s in cond}
            for speaker in manifest.speakers(noise_type):
                have = {s for sp, s in cond if sp == speaker}
                for missing in sorted(all_sentences - have):
                    defects.append(f"missing: speaker={speaker} noise={noise_type} "
                                   f"level={level} sentence={missing}")

    if check_audio:
        for e in manifest.entries:
            p = manifest.resolve(e)
            if not p.is_file():
                defects.append(f"file not found: {p} (speaker={e.speaker_id} "
                               f"noise={e.noise_type} level={e.level_dba} "
                               f"sentence={e.sentence_id})")
                continue
            try:
                read_wav(p)
            except Exception as exc:
                defects.append(f"undecodable: {p}: {exc}")

    return ValidationReport(len(manifest.entries), tuple(defects))
