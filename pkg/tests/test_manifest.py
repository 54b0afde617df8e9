"""Manifest parsing, path resolution and defect aggregation."""

import numpy as np
import pytest

from lombardkit import (AudioSignal, CorpusManifest, ManifestEntry,
                        ManifestError, validate_manifest, write_wav)


def small_manifest(root, n_speakers=2, n_sentences=2, levels=(30.0, 35.0)):
    rng = np.random.default_rng(0)
    entries = []
    for sp in range(n_speakers):
        for sn in range(n_sentences):
            for lv in levels:
                rel = f"sp{sp}_sn{sn}_lv{lv:g}.wav"
                sig = AudioSignal(rng.standard_normal(4000) * 0.1, 16000)
                write_wav(sig, root / rel)
                entries.append(ManifestEntry(f"sp{sp}", "ssn", lv, f"sn{sn}", rel))
    return CorpusManifest(tuple(entries), root=root)


class TestEntriesAndManifest:
    def test_entry_normalizes_noise_type(self):
        e = ManifestEntry("sp0", "SSN", 30.0, "sn0", "x.wav")
        assert e.noise_type == "ssn"
        with pytest.raises(ManifestError):
            ManifestEntry("sp0", "pink", 30.0, "sn0", "x.wav")
        with pytest.raises(ManifestError):
            ManifestEntry("", "ssn", 30.0, "sn0", "x.wav")

    def test_ladder_validation(self):
        e = ManifestEntry("sp0", "ssn", 30.0, "sn0", "x.wav")
        with pytest.raises(ManifestError):
            CorpusManifest((e,), ladder=(30.0,))
        with pytest.raises(ManifestError):
            CorpusManifest((e,), ladder=(30.0, 30.0))

    def test_queries(self, tmp_path):
        man = small_manifest(tmp_path)
        assert man.speakers("ssn") == ["sp0", "sp1"]
        assert man.sentences("ssn", 30.0) == ["sn0", "sn1"]
        assert man.levels("ssn") == [30.0, 35.0]
        entry = man.lookup("sp1", "ssn", 35.0, "sn0")
        assert entry.path.endswith("lv35.wav")
        with pytest.raises(ManifestError):
            man.lookup("sp9", "ssn", 35.0, "sn0")

    def test_resolve_relative_and_absolute(self, tmp_path):
        man = small_manifest(tmp_path)
        rel_entry = man.entries[0]
        assert man.resolve(rel_entry) == tmp_path / rel_entry.path
        abs_entry = ManifestEntry("sp0", "ssn", 30.0, "sn0", "/abs/x.wav")
        assert str(man.resolve(abs_entry)) == "/abs/x.wav"

    def test_csv_round_trip(self, tmp_path):
        man = small_manifest(tmp_path)
        p = tmp_path / "man.csv"
        man.to_csv(p)
        back = CorpusManifest.from_csv(p, ladder=man.ladder)
        assert back.entries == man.entries
        assert back.root == tmp_path

    def test_json_round_trip(self, tmp_path):
        man = small_manifest(tmp_path)
        p = tmp_path / "man.json"
        man.to_json(p)
        back = CorpusManifest.from_json(p)
        assert back.entries == man.entries
        assert back.ladder == man.ladder

    def test_csv_bad_shape(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("speaker_id,noise_type,level_dba,sentence_id,path\na,b\n")
        with pytest.raises(ManifestError):
            CorpusManifest.from_csv(p)


class TestValidation:
    def test_clean_manifest_passes(self, tmp_path):
        report = validate_manifest(small_manifest(tmp_path))
        assert report.ok
        assert report.n_entries == 8
        assert "0 defects" in str(report)

    def test_empty_manifest(self):
        report = validate_manifest(CorpusManifest((), root=None))
        assert not report.ok

    def test_missing_combination_named(self, tmp_path):
        man = small_manifest(tmp_path)
        # drop sp1/sn1 at 35 dBA: exactly one defect naming that cell
        entries = tuple(e for e in man.entries
                        if not (e.speaker_id == "sp1" and e.sentence_id == "sn1"
                                and e.level_dba == 35.0))
        report = validate_manifest(CorpusManifest(entries, root=tmp_path))
        assert len(report.defects) == 1
        assert "sp1" in report.defects[0]
        assert "sn1" in report.defects[0]
        assert "35" in report.defects[0]

    def test_duplicate_detected(self, tmp_path):
        man = small_manifest(tmp_path)
        report = validate_manifest(
            CorpusManifest(man.entries + (man.entries[0],), root=tmp_path))
        assert any("duplicate" in d for d in report.defects)

    def test_missing_file_detected(self, tmp_path):
        man = small_manifest(tmp_path)
        (tmp_path / man.entries[0].path).unlink()
        report = validate_manifest(man)
        assert any("not found" in d for d in report.defects)

    def test_undecodable_detected(self, tmp_path):
        man = small_manifest(tmp_path)
        (tmp_path / man.entries[0].path).write_bytes(b"garbage bytes here")
        report = validate_manifest(man)
        assert any("undecodable" in d for d in report.defects)

    def test_audio_check_can_be_skipped(self, tmp_path):
        man = small_manifest(tmp_path)
        (tmp_path / man.entries[0].path).unlink()
        assert validate_manifest(man, check_audio=False).ok

    def test_aggregates_multiple_defects(self, tmp_path):
        man = small_manifest(tmp_path)
        (tmp_path / man.entries[0].path).unlink()
        (tmp_path / man.entries[1].path).write_bytes(b"junk")
        report = validate_manifest(man)
        assert len(report.defects) >= 2
