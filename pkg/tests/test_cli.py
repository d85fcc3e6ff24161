"""CLI subcommands, config parsing, file outputs, exit codes."""

import csv

import pytest

from risc2win.cli import (
    ConfigError,
    build_settings,
    load_config,
    main,
    parse_config_text,
)

SMOKE_CONFIG = """
# small smoke configuration
rho_a = 0.5
rho_b = 0.5
w = 10
R = 2
r0 = 2
epsilon = 0.15
horizon = 2000
seeds = 1,2
"""


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "smoke.cfg"
    path.write_text(SMOKE_CONFIG, encoding="utf-8")
    return str(path)


def read_csv(path):
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.reader(fh))


class TestConfigParsing:
    def test_comments_and_blanks_ignored(self):
        items = parse_config_text("# c\n\nrho_a = 0.3 # inline\n")
        assert items == {"rho_a": "0.3"}

    def test_bad_line_rejected(self):
        with pytest.raises(ConfigError):
            parse_config_text("justtext\n")

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError):
            build_settings({"rho_c": "1"}, 1000)

    def test_defaults(self):
        s = build_settings({}, 12345)
        assert s["w"] == 10.0
        assert s["R"] == 10
        assert s["r0"] == 10
        assert s["epsilon"] == 0.15
        assert s["horizon"] == 12345
        assert s["len_min"] == 6 and s["len_max"] == 15
        assert s["seeds"] == [1]

    def test_pmf_entries(self):
        s = build_settings({"pmf.3": "0.5", "pmf.4": "0.5"}, 100)
        assert s["pmf"] == {3: 0.5, 4: 0.5}

    def test_missing_file(self):
        with pytest.raises(ConfigError):
            load_config("/nonexistent/path.cfg")


class TestSimulate:
    def test_neutral_profile_outputs(self, config_file, tmp_path):
        out = tmp_path / "out"
        code = main(
            ["simulate", "--config", config_file, "--profile", "(inf, -inf, inf, -inf)",
             "--seed", "1", "--out", str(out)]
        )
        assert code == 0
        for name in ("sessions.csv", "reputation.csv", "trajectories.csv", "summary.csv", "manifest.txt"):
            assert (out / name).is_file()
        rows = read_csv(out / "summary.csv")
        assert rows[0][0] == "station"
        by_station = {row[0]: row for row in rows[1:]}
        assert float(by_station["A"][1]) == 0.0  # u_be
        assert float(by_station["B"][1]) == 0.0

    def test_barrier_profile_keeps_r_nonnegative(self, config_file, tmp_path):
        out = tmp_path / "out"
        assert main(["simulate", "--config", config_file, "--profile", "(inf, 0, inf, -inf)",
                     "--out", str(out)]) == 0
        rows = read_csv(out / "reputation.csv")
        r_values = [int(row[4]) for row in rows[1:]]
        assert min(r_values) >= 0

    def test_nontrivial_profile_runs(self, config_file, tmp_path):
        out = tmp_path / "out"
        assert main(["simulate", "--config", config_file, "--profile", "(2, 1, 2, 1)",
                     "--out", str(out)]) == 0
        rows = read_csv(out / "sessions.csv")
        assert len(rows) > 10

    def test_rerun_byte_identical(self, config_file, tmp_path):
        out1 = tmp_path / "o1"
        out2 = tmp_path / "o2"
        args = ["simulate", "--config", config_file, "--profile", "(2, 1, 2, 1)", "--seed", "3"]
        assert main(args + ["--out", str(out1)]) == 0
        assert main(args + ["--out", str(out2)]) == 0
        for name in ("sessions.csv", "reputation.csv", "trajectories.csv", "summary.csv"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()

    def test_manifest_roundtrips(self, config_file, tmp_path):
        out = tmp_path / "out"
        assert main(["simulate", "--config", config_file, "--out", str(out)]) == 0
        text = (out / "manifest.txt").read_text(encoding="utf-8")
        config_part = text.split("[config]", 1)[1].split("[outputs]", 1)[0]
        echoed = build_settings(parse_config_text(config_part), 2000)
        original = build_settings(parse_config_text(SMOKE_CONFIG), 2000)
        for key in ("rho_a", "rho_b", "w", "R", "r0", "epsilon", "horizon", "floor_policy"):
            assert echoed[key] == original[key]
        assert echoed["pmf"] or echoed["len_min"] == original["len_min"]

    def test_bad_config_exit_code(self, tmp_path):
        bad = tmp_path / "bad.cfg"
        bad.write_text("rho_a = 2.0\n", encoding="utf-8")
        assert main(["simulate", "--config", str(bad), "--out", str(tmp_path / "o")]) == 2

    def test_missing_config_exit_code(self, tmp_path):
        assert main(["simulate", "--config", "/no/such.cfg", "--out", str(tmp_path / "o")]) == 2


@pytest.fixture(scope="module")
def sweep_out(tmp_path_factory):
    cfg_dir = tmp_path_factory.mktemp("cfg")
    cfg = cfg_dir / "smoke.cfg"
    cfg.write_text(SMOKE_CONFIG, encoding="utf-8")
    out = tmp_path_factory.mktemp("sweep_out")
    code = main(["sweep", "--config", str(cfg), "--out", str(out)])
    assert code == 0
    return out


@pytest.fixture(scope="module")
def payoff_files(sweep_out):
    return [str(sweep_out / "payoffs_seed1.csv"), str(sweep_out / "payoffs_seed2.csv")]


class TestSweepCommand:
    def test_one_file_per_seed_with_grid_rows(self, sweep_out):
        for seed in (1, 2):
            rows = read_csv(sweep_out / f"payoffs_seed{seed}.csv")
            assert rows[0] == list(
                ("ta_comb", "ta_down", "tb_down", "tb_up", "u_a_be", "u_a_vo", "u_b_be", "u_b_vo", "U_a", "U_b")
            )
            assert len(rows) - 1 == 25  # 5 x 5 grid at R = 2

    def test_rerun_byte_identical(self, sweep_out, tmp_path):
        cfg = tmp_path / "smoke.cfg"
        cfg.write_text(SMOKE_CONFIG, encoding="utf-8")
        out2 = tmp_path / "again"
        assert main(["sweep", "--config", str(cfg), "--seeds", "1", "--out", str(out2)]) == 0
        assert (out2 / "payoffs_seed1.csv").read_bytes() == (sweep_out / "payoffs_seed1.csv").read_bytes()


class TestNashCommand:
    def test_epsilon_one_keeps_all_rows(self, payoff_files, tmp_path):
        out = tmp_path / "nash"
        assert main(["nash", *payoff_files, "--epsilon", "1.0", "--out", str(out)]) == 0
        rows = read_csv(out / "nash.csv")
        assert len(rows) - 1 == 2 * 25
        assert (out / "report.txt").is_file()

    def test_zero_epsilon_subset_of_default(self, payoff_files, tmp_path):
        out0 = tmp_path / "n0"
        out15 = tmp_path / "n15"
        assert main(["nash", *payoff_files, "--epsilon", "0.0", "--out", str(out0)]) == 0
        assert main(["nash", *payoff_files, "--epsilon", "0.15", "--out", str(out15)]) == 0
        rows0 = {tuple(r) for r in read_csv(out0 / "nash.csv")[1:]}
        rows15 = {tuple(r) for r in read_csv(out15 / "nash.csv")[1:]}
        assert rows0 <= rows15

    def test_inconsistent_files_rejected(self, payoff_files, tmp_path):
        other_cfg = tmp_path / "other.cfg"
        smaller = SMOKE_CONFIG.replace("R = 2", "R = 1").replace("r0 = 2", "r0 = 1")
        other_cfg.write_text(smaller, encoding="utf-8")
        other_out = tmp_path / "other"
        assert main(["sweep", "--config", str(other_cfg), "--seeds", "1", "--out", str(other_out)]) == 0
        out = tmp_path / "nash"
        code = main(["nash", payoff_files[0], str(other_out / "payoffs_seed1.csv"), "--out", str(out)])
        assert code == 2

    def test_missing_file_rejected(self, tmp_path):
        assert main(["nash", "/no/file.csv", "--out", str(tmp_path / "n")]) == 2
