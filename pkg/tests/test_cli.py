"""Command line behavior: outputs, formats and exit codes."""

import json

import numpy as np
import pytest

from lombardkit import (LTASS_CENTERS, ComparisonRecord, ObservationPair,
                        PipelineConfig, SpectrumEnvelope, map_stoi_to_wcr,
                        read_wav, save_observations, write_wav)
from lombardkit.audio import a_weighted_level
from lombardkit.cli import main
from lombardkit.mapping import PUBLISHED_2024
from tests.conftest import make_utterance

pytestmark = pytest.mark.filterwarnings("ignore::UserWarning")


def write_utterance(path, seed=0):
    write_wav(make_utterance(seed), path)
    return str(path)


def flat_envelope_csv(path):
    env = SpectrumEnvelope(tuple(LTASS_CENTERS), tuple([0.0] * len(LTASS_CENTERS)))
    env.to_csv(path)
    return str(path)


class TestBasics:
    def test_version_string(self, capsys):
        assert main(["--version"]) == 0
        out = capsys.readouterr().out
        assert out.startswith("lombardkit ")
        assert "(config-schema 1)" in out

    def test_no_command_prints_usage(self, capsys):
        assert main([]) == 2
        assert "usage:" in capsys.readouterr().err

    def test_unknown_command(self, capsys):
        assert main(["frobnicate"]) == 2
        assert "invalid choice" in capsys.readouterr().err

    def test_json_errors_single_line(self, capsys):
        code = main(["--json-errors", "stoi", "--clean", "/no/such.wav",
                     "--degraded", "/no/such.wav"])
        assert code == 2
        err = capsys.readouterr().err.strip()
        assert "\n" not in err
        payload = json.loads(err)
        assert payload["error"] == "FileNotFoundError"
        assert "message" in payload


class TestStoiCommand:
    def test_identical_files_score_one(self, tmp_path, capsys):
        wav = write_utterance(tmp_path / "utt.wav")
        assert main(["stoi", "--clean", wav, "--degraded", wav]) == 0
        assert capsys.readouterr().out.strip() == "1.000000"

    def test_missing_file_exits_two(self, capsys):
        assert main(["stoi", "--clean", "/no.wav", "--degraded", "/no.wav"]) == 2
        assert "error" in capsys.readouterr().err


class TestFitMapCommand:
    def test_recovers_known_parameters(self, tmp_path, capsys):
        scores = np.linspace(0.2, 0.9, 24)
        pairs = [ObservationPair(float(d), float(map_stoi_to_wcr(d, PUBLISHED_2024)))
                 for d in scores]
        csv_path = tmp_path / "pairs.csv"
        save_observations(pairs, csv_path)
        out_json = tmp_path / "fit.json"
        assert main(["fit-map", "--pairs", str(csv_path),
                     "--out", str(out_json)]) == 0
        out = capsys.readouterr().out
        values = {}
        for line in out.splitlines():
            if " = " in line:
                key, val = line.split(" = ", 1)
                values[key] = val
        assert abs(float(values["a"]) - (-10.8800)) < 1e-4
        assert abs(float(values["b"]) - 6.1200) < 1e-4
        assert float(values["rmse"]) < 1e-6
        saved = json.loads(out_json.read_text())
        assert abs(saved["a"] - (-10.88)) < 1e-4

    def test_empty_pairs_file_exits_two(self, tmp_path, capsys):
        p = tmp_path / "pairs.csv"
        p.write_text("stoi,wcr\n")
        assert main(["fit-map", "--pairs", str(p)]) == 2


class TestGenNoiseCommand:
    def test_ssn_hits_target_level(self, tmp_path):
        ltass = flat_envelope_csv(tmp_path / "ltass.csv")
        out = tmp_path / "noise.wav"
        assert main(["gen-noise", "--kind", "ssn", "--level", "65",
                     "--seconds", "2", "--seed", "3", "--rate", "16000",
                     "--ltass", ltass, "--out", str(out)]) == 0
        sig = read_wav(out)
        assert sig.sample_rate == 16000
        assert sig.samples.size == 32000
        assert abs(a_weighted_level(sig, PipelineConfig().calibration) - 65.0) < 0.05

    def test_ssn_requires_ltass(self, tmp_path, capsys):
        code = main(["gen-noise", "--kind", "ssn", "--level", "65",
                     "--seconds", "2", "--seed", "3",
                     "--out", str(tmp_path / "x.wav")])
        assert code == 2
        assert "ltass" in capsys.readouterr().err.lower()

    def test_babble_from_streams(self, tmp_path):
        streams = [write_utterance(tmp_path / f"t{i}.wav", seed=i)
                   for i in range(4)]
        out = tmp_path / "babble.wav"
        assert main(["gen-noise", "--kind", "babble", "--level", "60",
                     "--seconds", "2", "--seed", "9", "--out", str(out),
                     "--streams", *streams]) == 0
        sig = read_wav(out)
        assert abs(a_weighted_level(sig, PipelineConfig().calibration) - 60.0) < 0.05

    def test_babble_requires_streams(self, tmp_path):
        assert main(["gen-noise", "--kind", "babble", "--level", "60",
                     "--seconds", "2", "--seed", "9",
                     "--out", str(tmp_path / "x.wav")]) == 2


class TestSelfFeedbackCommand:
    def test_air_only_round_trip(self, tmp_path):
        src = tmp_path / "in.wav"
        write_utterance(src, seed=4)
        out = tmp_path / "fb.wav"
        assert main(["self-feedback", "--in", str(src), "--out", str(out),
                     "--air-gain", "1", "--bone-gain", "0"]) == 0
        a, b = read_wav(src), read_wav(out)
        assert np.allclose(a.samples, b.samples, atol=2e-7)

    def test_wide_open_bone_doubles(self, tmp_path):
        src = tmp_path / "in.wav"
        write_utterance(src, seed=4)
        out = tmp_path / "fb.wav"
        assert main(["self-feedback", "--in", str(src), "--out", str(out),
                     "--air-gain", "1", "--bone-gain", "1",
                     "--cutoff", "90000"]) == 0
        a, b = read_wav(src), read_wav(out)
        assert np.allclose(2.0 * a.samples, b.samples, atol=4e-7)


class TestPipelineCommands:
    @pytest.fixture()
    def fast_config_path(self, tmp_path):
        p = tmp_path / "config.json"
        PipelineConfig(noise_duration=4.0).to_json(p)
        return str(p)

    def test_evaluate_pair_prints_summary(self, mini_corpus, fast_config_path,
                                          tmp_path, capsys):
        out_json = tmp_path / "pair.json"
        code = main(["evaluate-pair",
                     "--manifest", str(mini_corpus.root / "manifest.csv"),
                     "--noise", "ssn", "--base", "30", "--high", "45",
                     "--config", fast_config_path, "--jobs", "1",
                     "--out", str(out_json)])
        assert code == 0
        line = capsys.readouterr().out.strip()
        assert line.startswith("30/45")
        assert "↑*" in line
        assert "p=" in line
        rec = ComparisonRecord.from_dict(json.loads(out_json.read_text()))
        assert rec.significant

    def test_classify_writes_report(self, mini_corpus, fast_config_path,
                                    tmp_path):
        out = tmp_path / "report.txt"
        code = main(["classify",
                     "--manifest", str(mini_corpus.root / "manifest.csv"),
                     "--noise", "ssn", "--config", fast_config_path,
                     "--jobs", "1", "--skip-audio-check", "--out", str(out)])
        assert code == 0
        text = out.read_text()
        assert "transition points (dBA): 45, 65, 75" in text
        assert "flavors: 4" in text

    def test_classify_rejects_defective_manifest(self, tmp_path, capsys):
        man = tmp_path / "manifest.csv"
        man.write_text("speaker_id,noise_type,level_dba,sentence_id,path\n"
                       "sp0,ssn,30.0,sn0,missing.wav\n")
        code = main(["classify", "--manifest", str(man), "--noise", "ssn"])
        assert code == 2
        assert "defect" in capsys.readouterr().err

    def test_classify_json_format_round_trips(self, mini_corpus,
                                              fast_config_path, tmp_path):
        out = tmp_path / "report.json"
        code = main(["classify",
                     "--manifest", str(mini_corpus.root / "manifest.csv"),
                     "--noise", "ssn", "--config", fast_config_path,
                     "--jobs", "1", "--skip-audio-check", "--out", str(out)])
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["transition_points"] == [45.0, 65.0, 75.0]
        assert payload["n_flavors"] == 4
