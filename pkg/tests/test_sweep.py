from __future__ import annotations

import json
from dataclasses import replace

import pytest

from hecke_lowzeros.errors import DomainError, RangeError, TruncationError
from hecke_lowzeros.sweep import CACHE_ENV, RunConfig, default_cache_dir, run_density, sweep, write_outputs

SMALL = RunConfig(x_scale=1e3, w="bump:1,1.08", quick=True, with_ratios=True)


def _bytes(out_dir):
    return {p.name: p.read_bytes() for p in sorted(out_dir.iterdir())}


def test_outputs_are_deterministic(tmp_path):
    a = run_density(replace(SMALL, cache_dir=str(tmp_path / "cache")))
    write_outputs(a, tmp_path / "a")
    # second run reads every zero set from the cache
    b = run_density(replace(SMALL, cache_dir=str(tmp_path / "cache")))
    write_outputs(b, tmp_path / "b")
    c = run_density(replace(SMALL, jobs=2))
    write_outputs(c, tmp_path / "c")
    assert _bytes(tmp_path / "a") == _bytes(tmp_path / "b") == _bytes(tmp_path / "c")
    names = sorted(_bytes(tmp_path / "a"))
    h = SMALL.hash()
    assert names == sorted([f"density_{h}.json", f"per_prime_{h}.csv", f"ratios_{h}.json", f"config_{h}.json"])


def test_report_contents(tmp_path):
    run = run_density(SMALL)
    rep = json.loads(run.report.to_json())
    assert rep["n_primes"] == len(run.primes) > 0
    assert rep["usp_limit"] == pytest.approx(0.75)
    assert rep["ratios_prediction"] == pytest.approx(run.ratios.weighted_average)
    assert all(z.completeness == "count-consistent" for z in run.zero_sets)
    assert 0.3 < rep["d_corrected"] < 2.0


def test_hash_tracks_only_output_relevant_fields():
    base = RunConfig()
    assert base.hash() == replace(base, jobs=4, cache_dir="/x", out="/y").hash()
    assert base.hash() != replace(base, phi="fejer:nu=0.5").hash()
    assert base.hash() != replace(base, quick=True).hash()


def test_t_max_follows_scan_cap():
    cfg = RunConfig(x_scale=1e4)
    assert cfg.t_max == pytest.approx(40 * 2 * 3.141592653589793 / 9.210340371976184)
    assert replace(cfg, quick=True).t_max < cfg.t_max


@pytest.mark.parametrize(
    "bad",
    [
        dict(x_scale=0.5),
        dict(phi="fejer:nu=2"),
        dict(w="bump:2,1"),
        dict(tol=1e-12),
        dict(jobs=0),
        dict(max_norm=0),
        dict(tmax_cap=-1),
    ],
)
def test_config_validation(bad):
    with pytest.raises(DomainError):
        RunConfig(**bad).validate()


def test_empty_family():
    with pytest.raises(RangeError):
        run_density(RunConfig(x_scale=2.0, w="bump:1,1.01"))


def test_table_guard_names_the_prime():
    with pytest.raises(TruncationError, match=r"prime -?\d+[+-]\d+i"):
        sweep(replace(SMALL, max_norm=1000))


def test_cache_dir_environment(monkeypatch, tmp_path):
    monkeypatch.setenv(CACHE_ENV, str(tmp_path))
    assert default_cache_dir() == tmp_path
    monkeypatch.delenv(CACHE_ENV)
    assert default_cache_dir().name == "hecke_lowzeros"
