import io

import pytest

from mcsim.cli import ConfigError, emit_csv, format_config, main, parse_config
from mcsim.cli import _parse_items, _resolve
from mcsim.engine import BerRecord


def test_empty_config_yields_reference_defaults():
    config = parse_config("")
    assert [s.scheme for s in config.schemes] == ["none", "mrc", "alamouti"]
    assert [c.kind for c in config.channels] == ["awgn", "rayleigh", "rician"]
    assert all(s.users == 4 and s.channels == 4 for s in config.schemes)
    assert all(s.wavelet_family == "haar" and s.power_split for s in config.schemes)
    assert config.snr_points() == tuple(float(v) for v in range(0, 21, 2))
    assert config.stopping.min_bit_errors == 100
    assert config.stopping.max_bits == 10_000_000
    assert all(c.rician_k_db == 6.0 for c in config.channels)


def test_config_overrides_defaults():
    config = parse_config(
        "users = 2\nschemes = alamouti\nchannels=rician\n"
        "snr_start=4\nsnr_step=4\nsnr_stop=12  # trailing comment\n"
        "power_split = off\nseed = 99\n"
    )
    assert [s.scheme for s in config.schemes] == ["alamouti"]
    assert config.schemes[0].users == 2
    assert not config.schemes[0].power_split
    assert config.snr_points() == (4.0, 8.0, 12.0)
    assert config.master_seed == 99


def test_users_exceeding_code_length_rejected():
    with pytest.raises(ConfigError, match="users exceeds code_length"):
        parse_config("users = 5\n")


def test_zero_snr_step_rejected():
    with pytest.raises(ConfigError, match="snr_step"):
        parse_config("snr_step = 0\n")


def test_unknown_key_names_line():
    with pytest.raises(ConfigError, match="line 2: unknown key 'bandwidth'"):
        parse_config("users = 4\nbandwidth = 10\n")


def test_malformed_line_reported():
    with pytest.raises(ConfigError, match="line 1"):
        parse_config("this is not a config line\n")


def test_bad_values_name_the_key():
    with pytest.raises(ConfigError, match="'users'"):
        parse_config("users = four\n")
    with pytest.raises(ConfigError, match="'power_split'"):
        parse_config("power_split = sideways\n")
    with pytest.raises(ConfigError, match="'schemes'"):
        parse_config("schemes = none,teleport\n")
    with pytest.raises(ConfigError, match="'wavelet'"):
        parse_config("wavelet = sym9\n")


def test_resolved_config_round_trips():
    text = "users = 2\nschemes = mrc\nsnr_stop = 8\nseed = 5\n"
    resolved = _resolve(_parse_items(text))
    echoed = format_config(resolved)
    assert _resolve(_parse_items(echoed)) == resolved


def _record(**overrides):
    base = dict(
        scheme="alamouti",
        channel="awgn",
        snr_db=5.0,
        users=4,
        bits_sent=100000,
        bit_errors=4630,
        ber=0.0463,
        ci95_low=0.0451,
        ci95_high=0.0475,
        master_seed=42,
    )
    base.update(overrides)
    return BerRecord(**base)


def test_emit_csv_exact_bytes():
    out = io.StringIO()
    emit_csv([_record()], out)
    assert out.getvalue() == (
        "scheme,channel,snr_db,users,bits_sent,bit_errors,ber,ci95_low,ci95_high,seed\n"
        "alamouti,awgn,5.00,4,100000,4630,4.63000e-02,4.51000e-02,4.75000e-02,42\n"
    )


def test_emit_csv_rejects_empty():
    with pytest.raises(ValueError):
        emit_csv([], io.StringIO())


def test_emit_csv_is_deterministic(tmp_path):
    records = [_record(), _record(snr_db=7.0, ber=1.0e-4, bit_errors=10)]
    first = tmp_path / "a.csv"
    second = tmp_path / "b.csv"
    emit_csv(records, first)
    emit_csv(records, second)
    assert first.read_bytes() == second.read_bytes()


FAST_CFG = (
    "min_errors = 20\nmax_bits = 4000\nsnr_start = 0\nsnr_step = 5\nsnr_stop = 5\n"
    "schemes = none,alamouti\nchannels = awgn\n"
)


def _write_cfg(tmp_path, text=FAST_CFG):
    path = tmp_path / "sweep.cfg"
    path.write_text(text)
    return str(path)


def test_run_twice_gives_identical_files(tmp_path):
    cfg = _write_cfg(tmp_path)
    out1 = tmp_path / "one.csv"
    out2 = tmp_path / "two.csv"
    assert main(["run", "--config", cfg, "--seed", "42", "--out", str(out1)]) == 0
    assert main(["run", "--config", cfg, "--seed", "42", "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_thread_counts_agree_byte_for_byte(tmp_path):
    cfg = _write_cfg(tmp_path)
    single = tmp_path / "t1.csv"
    auto = tmp_path / "t8.csv"
    assert main(["run", "--config", cfg, "--seed", "7", "--out", str(single), "--threads", "1"]) == 0
    assert main(["run", "--config", cfg, "--seed", "7", "--out", str(auto), "--threads", "8"]) == 0
    assert single.read_bytes() == auto.read_bytes()


def test_echoed_config_reproduces_run(tmp_path, capsys):
    cfg = _write_cfg(tmp_path)
    out1 = tmp_path / "orig.csv"
    assert main(["run", "--config", cfg, "--seed", "5", "--out", str(out1)]) == 0
    echoed = capsys.readouterr().err
    block = echoed.split("# resolved configuration\n", 1)[1]
    replay_cfg = tmp_path / "replay.cfg"
    # strip the output path so the replay writes to its own file
    replay_cfg.write_text(
        "\n".join(l for l in block.splitlines() if not l.startswith("output")) + "\n"
    )
    out2 = tmp_path / "replay.csv"
    assert main(["run", "--config", str(replay_cfg), "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_scheme_and_channel_flags_filter(tmp_path, capsys):
    cfg = _write_cfg(tmp_path)
    assert main(["run", "--config", cfg, "--seed", "1", "--scheme", "none",
                 "--channel", "awgn", "--snr", "0:2:4"]) == 0
    csv_text = capsys.readouterr().out
    rows = csv_text.strip().splitlines()[1:]
    assert len(rows) == 3
    assert all(row.startswith("none,awgn,") for row in rows)


def test_invalid_snr_grid_is_usage_error(tmp_path):
    assert main(["run", "--snr", "5:0:5"]) == 2
    assert main(["run", "--snr", "oops"]) == 2
    assert main(["run", "--snr", "5:1:2"]) == 2


def test_unknown_flag_is_usage_error():
    assert main(["run", "--frobnicate"]) == 2
    assert main(["teleport"]) == 2


def test_config_error_is_validation_failure(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("users = 5\n")
    assert main(["run", "--config", str(path)]) == 1


def test_missing_config_file(tmp_path):
    assert main(["run", "--config", str(tmp_path / "nope.cfg")]) == 1


def test_env_seed_is_lowest_priority(tmp_path, monkeypatch):
    cfg = _write_cfg(tmp_path)
    env_out = tmp_path / "env.csv"
    explicit_out = tmp_path / "explicit.csv"
    monkeypatch.setenv("MCSIM_SEED", "777")
    assert main(["run", "--config", cfg, "--out", str(env_out)]) == 0
    assert main(["run", "--config", cfg, "--seed", "777", "--out", str(explicit_out)]) == 0
    assert env_out.read_bytes() == explicit_out.read_bytes()

    flag_out = tmp_path / "flag.csv"
    assert main(["run", "--config", cfg, "--seed", "42", "--out", str(flag_out)]) == 0
    assert flag_out.read_bytes() != env_out.read_bytes()

    file_out = tmp_path / "file.csv"
    file_cfg = _write_cfg(tmp_path, FAST_CFG + "seed = 42\n")
    assert main(["run", "--config", file_cfg, "--out", str(file_out)]) == 0
    assert file_out.read_bytes() == flag_out.read_bytes()


def test_selftest_reports_all_oracles(capsys):
    assert main(["selftest"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert all(line.startswith("PASS") for line in lines[:-1])
    assert "oracles passed" in lines[-1]
