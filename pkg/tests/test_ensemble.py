import json

import numpy as np
import pytest

from solitonlab.ensemble import RunConfig, pathwise_correspondence, run_ensemble
from solitonlab.exceptions import DomainError


def _small_cfg(**over):
    base = dict(
        mode="frozen",
        example="scalar",
        sigma=0.1,
        c_star=1.0,
        L=40.0,
        N=128,
        dt=2e-3,
        t_end=0.1,
        paths=8,
        seed=9,
        record_stride=10,
    )
    base.update(over)
    return RunConfig(**base)


def test_config_validation():
    with pytest.raises(DomainError):
        _small_cfg(mode="bogus").validate()
    with pytest.raises(DomainError):
        _small_cfg(example="pink").validate()
    with pytest.raises(DomainError):
        _small_cfg(sigma=-0.1).validate()
    with pytest.raises(DomainError):
        _small_cfg(dt=0.0).validate()
    with pytest.raises(DomainError):
        _small_cfg(paths=0).validate()


def test_noise_kind_selection():
    assert _small_cfg(example="scalar").noise_kind() == "scalar"
    assert _small_cfg(example="white").noise_kind() == "white"
    assert (
        _small_cfg(mode="direct", correlation_len=0.5).noise_kind() == "colored"
    )


def test_frozen_run_summary_shape():
    s = run_ensemble(_small_cfg())
    assert s.times[0] == 0.0
    assert s.times[-1] == pytest.approx(0.1)
    for name in ("c", "alpha", "omega", "vnorm", "sup_vnorm"):
        rec = s.observables[name]
        assert rec["mean"].shape == s.times.shape
        assert rec["n"] == 8
    assert s.excluded == 0
    assert np.allclose(s.observables["c"]["mean"][0], 1.0)


def test_identical_configs_are_deterministic(tmp_path):
    d1, d2 = tmp_path / "a", tmp_path / "b"
    run_ensemble(_small_cfg(output_dir=str(d1), store_paths=True))
    run_ensemble(_small_cfg(output_dir=str(d2), store_paths=True))
    assert (d1 / "summary.csv").read_bytes() == (d2 / "summary.csv").read_bytes()
    assert (d1 / "theory.csv").read_bytes() == (d2 / "theory.csv").read_bytes()
    assert (d1 / "paths" / "00003.csv").read_bytes() == (
        d2 / "paths" / "00003.csv"
    ).read_bytes()


def test_chunking_does_not_change_statistics():
    whole = run_ensemble(_small_cfg(chunk_size=100))
    parts = run_ensemble(_small_cfg(chunk_size=3))
    for name in ("c", "vnorm"):
        assert np.allclose(
            whole.observables[name]["mean"], parts.observables[name]["mean"],
            rtol=1e-12,
        )
        assert np.allclose(
            whole.observables[name]["var"], parts.observables[name]["var"],
            rtol=1e-9,
        )


def test_manifest_contents(tmp_path):
    out = tmp_path / "run"
    run_ensemble(_small_cfg(output_dir=str(out)))
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["config"]["seed"] == 9
    assert manifest["config"]["mode"] == "frozen"
    assert "Philox" in manifest["rng"]
    assert manifest["excluded_paths"] == []
    assert manifest["paths"] == 8
    assert "wall_time_s" in manifest


def test_summary_csv_roundtrip(tmp_path):
    out = tmp_path / "run"
    s = run_ensemble(_small_cfg(output_dir=str(out)))
    lines = (out / "summary.csv").read_text().strip().split("\n")
    assert lines[0] == "t,observable,mean,var,se,n"
    rows = [ln.split(",") for ln in lines[1:]]
    got = {
        (r[1], float(r[0])): (float(r[2]), float(r[3]))
        for r in rows
    }
    for i, t in enumerate(s.times):
        mean, var = got[("c", float(t))]
        assert mean == s.observables["c"]["mean"][i]
        assert var == s.observables["c"]["var"][i]


def test_ensemble_mode_records_approximations():
    s = run_ensemble(_small_cfg(mode="ensemble", paths=4))
    for name in ("c0", "c1", "c2", "alpha0", "omega0", "c_err2", "v_err1",
                 "sup_c_err2", "sup_v_err1"):
        assert name in s.observables
    # all hierarchy members start from the reference amplitude
    for k in range(3):
        assert s.observables[f"c{k}"]["mean"][0] == pytest.approx(1.0)


def test_approx_mode_runs_white():
    s = run_ensemble(
        _small_cfg(mode="approx", example="white", paths=4, max_order=1)
    )
    assert "alpha0" in s.observables and "alpha1" in s.observables
    assert "c2" not in s.observables


def test_direct_mode_energy_observable():
    s = run_ensemble(_small_cfg(mode="direct", paths=4))
    e0 = s.observables["energy"]["mean"][0]
    assert e0 == pytest.approx(6.0, rel=1e-4)
    assert np.allclose(s.observables["norm"]["mean"], np.sqrt(6.0), rtol=0.05)


def test_pathwise_correspondence_shapes():
    cfg = _small_cfg(
        mode="ensemble", sigma=0.05, N=256, t_end=0.05, paths=2, record_stride=5
    )
    out = pathwise_correspondence(cfg)
    nt = len(out["t"])
    assert out["c_direct"].shape == (nt, 2)
    assert out["c_frozen"].shape == (nt, 2)
    assert out["omega_direct"].shape == (nt, 2)
    assert np.all(out["frozen_failure"] == 0)
    assert not out["direct_blown"].any()
    # both descriptions start from the exact soliton
    assert np.allclose(out["c_direct"][0], cfg.c_star, atol=1e-6)
    assert np.allclose(out["c_frozen"][0], cfg.c_star, atol=1e-12)
