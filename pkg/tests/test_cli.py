import filecmp
import json

import pytest

from quadhecke.cli import ConfigError, RunConfig, main, parse_config, run


def test_parse_basic_example():
    cfg = parse_config(["--field", "-1", "--task", "first-moment",
                        "--alpha", "0.25", "--X", "1024..65536:geometric"])
    assert cfg.d == -1
    assert cfg.task == "first-moment"
    assert cfg.alpha == 0.25
    assert cfg.X_grid == [1024.0, 2048.0, 4096.0, 8192.0, 16384.0,
                          32768.0, 65536.0]


def test_parse_field_spellings():
    assert parse_config(["--field", "q", "--task", "verify-ring"]).d == 0
    assert parse_config(["--field", "-163", "--task", "verify-ring"]).d == -163
    with pytest.raises(ConfigError):
        parse_config(["--field", "-5", "--task", "verify-ring"])


def test_region_rejections():
    with pytest.raises(ConfigError, match="Re\\(alpha\\)"):
        parse_config(["--task", "ratios", "--alpha", "0.6", "--beta", "0.1"])
    with pytest.raises(ConfigError, match="E\\(alpha,beta\\)"):
        parse_config(["--task", "ratios", "--alpha", "0.3", "--beta", "-0.5"])
    with pytest.raises(ConfigError, match="0 < Re\\(beta\\)"):
        parse_config(["--task", "ratios", "--alpha", "0.3", "--beta", "0.4"])
    with pytest.raises(ConfigError, match="central-moment"):
        parse_config(["--task", "first-moment", "--alpha", "0"])
    with pytest.raises(ConfigError, match="Re\\(beta\\) > 0"):
        parse_config(["--task", "negative-moment", "--beta", "-0.2"])
    with pytest.raises(ConfigError, match="Re\\(r\\)"):
        parse_config(["--task", "logderiv-moment", "--r", "0.7"])
    # a = 1.5 is allowed for the density run (the asymptotic comparison
    # is simply skipped); a >= 2 is rejected outright
    cfg = parse_config(["--task", "density", "--a", "1.5", "--X", "1024"])
    assert cfg.a_radius == 1.5
    with pytest.raises(ConfigError, match=">= 2"):
        parse_config(["--task", "density", "--a", "2.5"])


def test_E_exponent_gate_message():
    # E(0.05, 0.01) = max{.5, .94, .97, .7, .99} = 0.99 < 1: passes
    cfg = parse_config(["--task", "ratios", "--alpha", "0.05",
                        "--beta", "0.02"])
    assert cfg.beta == 0.02


def test_config_file_and_precedence(tmp_path):
    p = tmp_path / "run.cfg"
    p.write_text("field=-3\ntask=verify-ring\nseed=7\n# comment\n")
    cfg = parse_config(["--config", str(p)])
    assert cfg.d == -3 and cfg.seed == 7
    cfg = parse_config(["--config", str(p), "--field", "-7"])
    assert cfg.d == -7         # flags beat the file


def test_grid_parsing():
    cfg = parse_config(["--task", "verify-ring", "--X", "100,200,400"])
    assert cfg.X_grid == [100.0, 200.0, 400.0]
    cfg = parse_config(["--task", "verify-ring", "--X", "16..128:geometric:4"])
    assert cfg.X_grid == [16.0, 64.0]
    with pytest.raises(ConfigError):
        parse_config(["--task", "verify-ring", "--X", "16..64:linear"])


def test_run_verify_tasks(tmp_path, capsys):
    cfg = RunConfig(d=-1, task="verify-ring", out_dir=str(tmp_path),
                    verify_norm_bound=500)
    assert run(cfg) == 0
    out = capsys.readouterr().out
    assert "primary uniqueness" in out and "PASS" in out
    cfg = RunConfig(d=-3, task="verify-characters", out_dir=str(tmp_path),
                    gauss_bound=3000)
    assert run(cfg) == 0
    out = capsys.readouterr().out
    assert "reciprocity" in out and "gauss sums" in out and "PASS" in out


def test_run_moment_outputs_deterministic(tmp_path, capsys):
    base = dict(d=-1, task="first-moment", alpha=0.25,
                X_grid=[1024.0, 2048.0, 4096.0, 8192.0])
    cfg1 = RunConfig(**base, out_dir=str(tmp_path / "r1"))
    cfg2 = RunConfig(**base, out_dir=str(tmp_path / "r2"))
    assert run(cfg1) == 0
    assert run(cfg2) == 0
    capsys.readouterr()
    f1 = tmp_path / "r1" / "quadhecke_first-moment_d-1.csv"
    f2 = tmp_path / "r2" / "quadhecke_first-moment_d-1.csv"
    assert filecmp.cmp(f1, f2, shallow=False), "reruns must be byte-identical"
    doc = json.loads((tmp_path / "r1" / "quadhecke_first-moment_d-1.json")
                     .read_text())
    assert doc["config_hash"]
    assert len(doc["reports"]) == 4
    row = doc["reports"][0]
    assert row["theorem"] == "first-moment"


def test_main_error_path(capsys):
    assert main(["--task", "ratios", "--alpha", "0.6", "--beta", "0.1"]) == 2
    assert "error:" in capsys.readouterr().err
