import filecmp
import os

import pytest

import synth
from auctionflow import cli
from auctionflow.export import REPORT_FILES


@pytest.fixture(scope="module")
def dataset(tmp_path_factory):
    d = tmp_path_factory.mktemp("synth")
    synth.generate(d / "auctions.csv", d / "forum.csv", d / "street.csv", seed=3)
    return d


def write_config(path, dataset, out_dir, seed=7):
    path.write_text(f"""\
auctions_path = "{dataset}/auctions.csv"
forum_path = "{dataset}/forum.csv"
street_prices_path = "{dataset}/street.csv"
out_dir = "{out_dir}"
seed = {seed}
restarts = 5
k_max = 6
valuation_window_months = 2
volatility_window_weeks = 4
""")


def run(args):
    return cli.main([str(a) for a in args])


def test_all_produces_sankey_and_reports(dataset, tmp_path):
    cfg = tmp_path / "config.toml"
    out = tmp_path / "out"
    write_config(cfg, dataset, out)
    assert run(["all", "--config", cfg]) == 0
    assert (out / "clusters.sankey.json").exists()
    report_dir = out / "reports"
    assert sorted(os.listdir(report_dir)) == sorted(REPORT_FILES)


def test_stage_without_upstream_exits_2(dataset, tmp_path, capsys):
    cfg = tmp_path / "config.toml"
    write_config(cfg, dataset, tmp_path / "fresh")
    assert run(["cluster", "--config", cfg]) == 2
    assert "records.csv" in capsys.readouterr().err


def test_missing_seed_exits_2(dataset, tmp_path):
    cfg = tmp_path / "config.toml"
    cfg.write_text(f'auctions_path = "{dataset}/auctions.csv"\n')
    assert run(["all", "--config", cfg]) == 2


def test_unknown_config_key_exits_2(dataset, tmp_path):
    cfg = tmp_path / "config.toml"
    cfg.write_text('zeed = 3\n')
    assert run(["all", "--config", cfg]) == 2


def test_determinism_two_runs_identical(dataset, tmp_path):
    outs = []
    for name in ("run1", "run2"):
        cfg = tmp_path / f"{name}.toml"
        out = tmp_path / name
        write_config(cfg, dataset, out)
        assert run(["all", "--config", cfg]) == 0
        outs.append(out)
    a, b = outs
    for rel in (["clusters.sankey.json"]
                + [os.path.join("reports", f) for f in REPORT_FILES]
                + [os.path.join("stages", f) for f in os.listdir(a / "stages")]):
        assert (a / rel).read_bytes() == (b / rel).read_bytes(), rel


def test_stage_isolation(dataset, tmp_path):
    cfg = tmp_path / "config.toml"
    out = tmp_path / "out"
    write_config(cfg, dataset, out)
    assert run(["all", "--config", cfg]) == 0
    before = {f: (out / "stages" / f).read_bytes()
              for f in os.listdir(out / "stages")}
    assert run(["label", "--config", cfg]) == 0
    after = {f: (out / "stages" / f).read_bytes()
             for f in os.listdir(out / "stages")}
    assert before == after


def test_flag_overrides(dataset, tmp_path):
    cfg = tmp_path / "config.toml"
    write_config(cfg, dataset, tmp_path / "ignored", seed=7)
    out = tmp_path / "flagged"
    assert run(["ingest", "--config", cfg, "--out", out, "--seed", 9]) == 0
    assert (out / "stages" / "records.csv").exists()
