"""Command-line surface: flags, config validation, exit codes, reproducibility."""

import numpy as np
import pytest

from chirplink import cli
from chirplink.fdss import load_filter_csv
from chirplink.simulation import design_filter

BASE_CONFIG = """\
waveform: {waveform}
deviation: 318.0
frame:
  subcarriers: 336
  idft_size: 512
  cp_len: 96
  repetition: 1
channel:
  type: awgn
sweep:
  ebn0_db: [5.0, 6.0]
  min_bits: 15000
  min_errors: 30
  max_frames: 4000
  seed: 11
"""


@pytest.fixture
def plain_config(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text(BASE_CONFIG.format(waveform="plain"))
    return path


class TestDesign:
    def test_sinusoidal_full_band(self, tmp_path, capsys):
        out = tmp_path / "filter.csv"
        rc = cli.main([
            "design", "--waveform", "sinusoidal", "--deviation", "318",
            "--subcarriers", "336", "--out", str(out),
        ])
        assert rc == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "k,re,im"
        assert len(lines) == 337
        report = capsys.readouterr().out
        assert "truncation loss" in report and "max/min" in report

    def test_plain_small(self, tmp_path):
        out = tmp_path / "plain.csv"
        assert cli.main(["design", "--waveform", "plain", "--subcarriers", "8",
                         "--out", str(out)]) == 0
        rows = out.read_text().splitlines()[1:]
        assert rows == [f"{k},1,0" for k in range(-3, 5)]

    def test_cli_matches_library(self, tmp_path):
        out = tmp_path / "tri.csv"
        assert cli.main(["design", "--waveform", "triangular", "--deviation", "318",
                         "--subcarriers", "336", "--out", str(out)]) == 0
        lib = design_filter("triangular", 318.0, 336)
        np.testing.assert_array_equal(load_filter_csv(out).coeffs, lib.coeffs)

    def test_rejects_oversized_deviation(self, tmp_path):
        rc = cli.main(["design", "--waveform", "linear", "--deviation", "400",
                       "--subcarriers", "336", "--out", str(tmp_path / "x.csv")])
        assert rc == 1

    def test_rejects_unknown_waveform(self, tmp_path):
        rc = cli.main(["design", "--waveform", "zigzag", "--subcarriers", "8",
                       "--out", str(tmp_path / "x.csv")])
        assert rc == 1


class TestSynthesize:
    def test_two_pulses_for_plain(self, plain_config, tmp_path):
        prefix = str(tmp_path / "synth_")
        rc = cli.main(["synthesize", "--config", str(plain_config),
                       "--data", "0=1,75=1", "--out-prefix", prefix])
        assert rc == 0
        rows = [r.split(",") for r in
                (tmp_path / "synth_time.csv").read_text().splitlines()
                if r and not r.startswith(("#", "sample"))]
        samples = np.array([float(r[1]) + 1j * float(r[2]) for r in rows])
        body = np.abs(samples[96:])
        top2 = np.sort(np.argsort(body)[-2:])
        assert top2[0] == 0
        assert abs(top2[1] - round(75 * 512 / 336)) <= 1
        spec_lines = (tmp_path / "synth_spectrogram.csv").read_text().splitlines()
        assert any(ln.startswith("start,bin0") for ln in spec_lines)

    def test_empty_data_rejected(self, plain_config, tmp_path):
        rc = cli.main(["synthesize", "--config", str(plain_config),
                       "--data", "", "--out-prefix", str(tmp_path / "s_")])
        assert rc == 1

    def test_out_of_range_index_rejected(self, plain_config, tmp_path):
        rc = cli.main(["synthesize", "--config", str(plain_config),
                       "--data", "400=1", "--out-prefix", str(tmp_path / "s_")])
        assert rc == 1


class TestBer:
    def test_runs_and_reproduces(self, plain_config, tmp_path):
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        assert cli.main(["ber", "--config", str(plain_config), "--out", str(out1)]) == 0
        assert cli.main(["ber", "--config", str(plain_config), "--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()
        body = [ln for ln in out1.read_text().splitlines() if not ln.startswith("#")]
        assert body[0] == "ebn0_db,snr_db,sim_ber,theory_ber,bits,frames"
        assert len(body) == 3

    def test_under_convergence_exit_code(self, tmp_path):
        cfg = tmp_path / "uc.yaml"
        cfg.write_text(BASE_CONFIG.format(waveform="plain").replace(
            "ebn0_db: [5.0, 6.0]", "ebn0_db: [11.0]").replace(
            "max_frames: 4000", "max_frames: 30"))
        rc = cli.main(["ber", "--config", str(cfg), "--out", str(tmp_path / "uc.csv")])
        assert rc == 2
        assert "under_converged_ebn0_db: 11" in (tmp_path / "uc.csv").read_text()

    def test_shipped_config_is_valid(self, tmp_path):
        raw = cli.load_config("configs/awgn_plain_r1.yaml")
        cfg = cli.link_config_from(raw)
        assert cfg.waveform == "plain"
        assert cfg.min_errors == 100


class TestAnalyze:
    def test_snrpost_identity_for_plain(self, plain_config, tmp_path):
        out = tmp_path / "snr.csv"
        rc = cli.main(["analyze", "--config", str(plain_config),
                       "--mode", "snrpost", "--out", str(out)])
        assert rc == 0
        rows = [ln.split(",") for ln in out.read_text().splitlines()
                if ln and not ln.startswith(("#", "snr_db"))]
        for snr_db, post_db, _alpha in rows:
            assert float(post_db) == pytest.approx(float(snr_db), abs=1e-6)

    def test_psd_output(self, tmp_path):
        cfg = tmp_path / "psd.yaml"
        cfg.write_text(BASE_CONFIG.format(waveform="sinusoidal")
                       + "analysis:\n  psd_frames: 1000\n")
        out = tmp_path / "psd.csv"
        rc = cli.main(["analyze", "--config", str(cfg), "--mode", "psd",
                       "--out", str(out)])
        assert rc == 0
        rows = [ln.split(",") for ln in out.read_text().splitlines()
                if ln and not ln.startswith(("#", "subcarrier"))]
        assert len(rows) == 512
        vals = {int(k): float(v) for k, v in rows}
        edge = np.mean([vals[k] for k in range(150, 168)])
        center = np.mean([vals[k] for k in range(-15, 16)])
        assert edge > center  # edge-heavy shaping visible in the PSD

    def test_papr_table(self, plain_config, tmp_path):
        out = tmp_path / "papr.csv"
        rc = cli.main(["analyze", "--config", str(plain_config),
                       "--mode", "papr", "--out", str(out)])
        assert rc == 0
        rows = {ln.split(",")[0]: ln.split(",") for ln in out.read_text().splitlines()
                if ln and "," in ln and not ln.startswith(("#", "waveform"))}
        assert set(rows) == {"plain", "linear", "sinusoidal", "triangular"}
        assert float(rows["sinusoidal"][1]) < float(rows["linear"][1])

    def test_unknown_mode_rejected(self, plain_config, tmp_path):
        rc = cli.main(["analyze", "--config", str(plain_config),
                       "--mode", "wigner", "--out", str(tmp_path / "x.csv")])
        assert rc == 1


class TestConfigValidation:
    def test_unknown_keys_rejected_and_named(self, tmp_path, capsys):
        cfg = tmp_path / "bad.yaml"
        cfg.write_text(BASE_CONFIG.format(waveform="plain") + "coding_rate: 0.5\n")
        rc = cli.main(["ber", "--config", str(cfg), "--out", str(tmp_path / "x.csv")])
        assert rc == 1
        assert "coding_rate" in capsys.readouterr().err

    def test_nested_unknown_key_rejected(self, tmp_path, capsys):
        cfg = tmp_path / "bad.yaml"
        cfg.write_text(BASE_CONFIG.format(waveform="plain").replace(
            "seed: 11", "seed: 11\n  jitter: 3"))
        rc = cli.main(["ber", "--config", str(cfg), "--out", str(tmp_path / "x.csv")])
        assert rc == 1
        assert "jitter" in capsys.readouterr().err

    def test_malformed_yaml(self, tmp_path):
        cfg = tmp_path / "broken.yaml"
        cfg.write_text("waveform: [unclosed\n")
        assert cli.main(["ber", "--config", str(cfg), "--out", str(tmp_path / "x.csv")]) == 1

    def test_missing_config_file(self, tmp_path):
        rc = cli.main(["ber", "--config", str(tmp_path / "none.yaml"),
                       "--out", str(tmp_path / "x.csv")])
        assert rc == 1

    def test_usage_error_exit_code(self):
        assert cli.main(["design"]) == 1  # missing required flags
