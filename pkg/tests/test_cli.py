import json

import pytest

from solitonlab.cli import _parse_window, _read_config_file, main


def test_parse_window():
    assert _parse_window("-50,20") == (-50.0, 20.0)


def test_read_config_file(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "# comment line\n"
        "example = white\n"
        "sigma = 0.25\n"
        "t-end = 0.5   # trailing comment\n"
        "cells = 128\n"
        "window = -30,10\n"
        "store-paths = true\n"
    )
    values = _read_config_file(str(cfg))
    assert values["example"] == "white"
    assert values["sigma"] == 0.25
    assert values["t_end"] == 0.5
    assert values["N"] == 128
    assert values["norm_window"] == (-30.0, 10.0)
    assert values["store_paths"] is True


def test_read_config_rejects_unknown_key(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("volume = 11\n")
    with pytest.raises(ValueError):
        _read_config_file(str(cfg))


def test_fit_order_subcommand(capsys):
    rc = main(
        ["fit-order", "--point", "0.05=1e-4", "--point", "0.1=8e-4",
         "--point", "0.2=6.4e-3"]
    )
    assert rc == 0
    out = capsys.readouterr().out
    assert "beta=3" in out
    assert "residual=" in out


def test_run_subcommand_with_config_and_overrides(tmp_path, capsys):
    cfgfile = tmp_path / "run.cfg"
    outdir = tmp_path / "out"
    cfgfile.write_text(
        "sigma = 0.1\n"
        "cells = 128\n"
        "dt = 2e-3\n"
        "t-end = 0.05\n"
        "paths = 4\n"
        "stride = 5\n"
    )
    rc = main(
        [
            "frozen",
            "--config", str(cfgfile),
            "--sigma", "0.05",       # flag wins over the config file
            "--seed", "3",
            "--out", str(outdir),
        ]
    )
    assert rc == 0
    assert "frozen: 4 paths" in capsys.readouterr().out
    manifest = json.loads((outdir / "manifest.json").read_text())
    assert manifest["config"]["sigma"] == 0.05
    assert manifest["config"]["N"] == 128
    assert manifest["config"]["seed"] == 3
    assert (outdir / "summary.csv").exists()
    assert (outdir / "theory.csv").exists()


def test_unknown_subcommand_exits():
    with pytest.raises(SystemExit):
        main(["interpolate"])
