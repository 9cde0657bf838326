import json

import numpy as np
import pytest
from click.testing import CliRunner

from voicemorph import (
    MorphInstance,
    MorphObject,
    Waveform,
    identity_anchors,
    read_vocp,
    write_morph_object,
    write_wav,
)
from voicemorph.anchors import AnchorSet
from voicemorph.cli import main

from conftest import SR, flat_params, random_params


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def wav_file(tmp_path):
    t = np.arange(int(0.3 * SR)) / SR
    tone = 0.4 * np.sin(2 * np.pi * 220.0 * t)
    path = tmp_path / "tone.wav"
    write_wav(path, Waveform(tone, SR))
    return path


@pytest.fixture
def morb_file(rng, tmp_path):
    a = random_params(rng, n_frames=25)
    b = random_params(rng, n_frames=30)
    obj = MorphObject(instances=(
        MorphInstance(a, identity_anchors(a), label="a"),
        MorphInstance(b, AnchorSet((), a.duration, b.duration, b.nyquist), label="b"),
    ))
    path = tmp_path / "pair.morb"
    write_morph_object(path, obj)
    return path


class TestAnalyzeSynth:
    def test_analyze_writes_vocp(self, runner, wav_file, tmp_path):
        out = tmp_path / "tone.vocp"
        result = runner.invoke(main, ["analyze", str(wav_file), "-o", str(out)])
        assert result.exit_code == 0, result.output
        params = read_vocp(out)
        voiced = params.fo[params.fo > 0]
        assert abs(np.median(voiced) - 220.0) < 3.0

    def test_round_trip_synth(self, runner, wav_file, tmp_path):
        vocp = tmp_path / "tone.vocp"
        wav_out = tmp_path / "resynth.wav"
        assert runner.invoke(main, ["analyze", str(wav_file), "-o", str(vocp)]).exit_code == 0
        result = runner.invoke(main, ["synth", str(vocp), "-o", str(wav_out)])
        assert result.exit_code == 0, result.output
        assert wav_out.stat().st_size > 1000

    def test_synth_deterministic_per_seed(self, runner, wav_file, tmp_path):
        vocp = tmp_path / "tone.vocp"
        runner.invoke(main, ["analyze", str(wav_file), "-o", str(vocp)])
        outs = []
        for name in ("a.wav", "b.wav"):
            out = tmp_path / name
            assert runner.invoke(
                main, ["--seed", "7", "synth", str(vocp), "-o", str(out)]
            ).exit_code == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]
        other = tmp_path / "c.wav"
        runner.invoke(main, ["--seed", "8", "synth", str(vocp), "-o", str(other)])
        assert other.read_bytes() != outs[0]

    def test_missing_input_is_usage_error(self, runner, tmp_path):
        result = runner.invoke(main, ["synth", str(tmp_path / "nope.vocp"),
                                      "-o", str(tmp_path / "x.wav")])
        assert result.exit_code == 2

    def test_corrupt_vocp_is_data_error(self, runner, tmp_path):
        bad = tmp_path / "bad.vocp"
        bad.write_bytes(b"not a parameter file at all")
        result = runner.invoke(main, ["synth", str(bad), "-o", str(tmp_path / "x.wav")])
        assert result.exit_code == 2
        assert "error" in result.output.lower() or result.stderr


class TestMorph:
    def test_rate_morph(self, runner, morb_file, tmp_path):
        out = tmp_path / "m.wav"
        result = runner.invoke(main, ["morph", str(morb_file), "--rate", "0.5",
                                      "-o", str(out)])
        assert result.exit_code == 0, result.output
        assert out.exists()

    def test_rate_and_weights_mutually_exclusive(self, runner, morb_file, tmp_path):
        weights = tmp_path / "w.json"
        weights.write_text(json.dumps({k: [0.5, 0.5] for k in
                                       ("tx", "fx", "sl", "fo", "ap")}))
        result = runner.invoke(main, ["morph", str(morb_file), "--rate", "0.5",
                                      "--weights", str(weights),
                                      "-o", str(tmp_path / "m.wav")])
        assert result.exit_code == 2

    def test_weights_file_morph(self, runner, morb_file, tmp_path):
        weights = tmp_path / "w.json"
        weights.write_text(json.dumps({
            "tx": [1.0, 0.0], "fx": [1.0, 0.0], "sl": [0.3, 0.7],
            "fo": [0.0, 1.0], "ap": [0.5, 0.5],
        }))
        out = tmp_path / "m.wav"
        result = runner.invoke(main, ["morph", str(morb_file),
                                      "--weights", str(weights), "-o", str(out)])
        assert result.exit_code == 0, result.output
        assert out.exists()

    def test_bad_weight_row_named_in_diagnostic(self, runner, morb_file, tmp_path):
        weights = tmp_path / "w.json"
        weights.write_text(json.dumps({
            "tx": [0.5, 0.5], "fx": [0.5, 0.5], "sl": [0.5, 0.5],
            "fo": [0.6, 0.6], "ap": [0.5, 0.5],
        }))
        result = runner.invoke(main, ["morph", str(morb_file),
                                      "--weights", str(weights),
                                      "-o", str(tmp_path / "m.wav")])
        assert result.exit_code == 2
        assert "fo" in result.output

    def test_morph_deterministic(self, runner, morb_file, tmp_path):
        blobs = []
        for name in ("a.wav", "b.wav"):
            out = tmp_path / name
            assert runner.invoke(main, ["--seed", "3", "morph", str(morb_file),
                                        "--rate", "0.25", "-o", str(out)]).exit_code == 0
            blobs.append(out.read_bytes())
        assert blobs[0] == blobs[1]


class TestContinuum:
    def test_series_written_with_zero_padded_names(self, runner, morb_file, tmp_path):
        out = tmp_path / "series"
        result = runner.invoke(main, ["continuum", str(morb_file), "--steps", "5",
                                      "--from", "0", "--to", "1", "-o", str(out)])
        assert result.exit_code == 0, result.output
        names = sorted(p.name for p in out.glob("*.wav"))
        assert len(names) == 5
        assert names[0].startswith("000_rate+0.000")
        assert names[-1].startswith("004_rate+1.000")

    def test_steps_below_two_rejected(self, runner, morb_file, tmp_path):
        result = runner.invoke(main, ["continuum", str(morb_file), "--steps", "1",
                                      "-o", str(tmp_path / "series")])
        assert result.exit_code == 2

    def test_extrapolated_range(self, runner, morb_file, tmp_path):
        out = tmp_path / "series"
        result = runner.invoke(main, ["continuum", str(morb_file), "--steps", "3",
                                      "--from", "-0.5", "--to", "1.5", "-o", str(out)])
        assert result.exit_code == 0, result.output
        assert len(list(out.glob("*.wav"))) == 3
