import json
import subprocess
import sys

import numpy as np
import pytest

from dkpsim.cli import (
    DEFAULT_TOLERANCES, EXPERIMENTS, ExperimentConfig, load_config, main, read_array,
    write_array,
)
from dkpsim.errors import ConfigError

FAST = {
    "evolve": {"grid": {"points": [4, 4, 4, 4]}, "tau": {"dtau": 0.05, "steps": 4}},
    "lightcone": {"lightcone": {"resolutions": [32, 64]}},
    "two-particle": {"two_particle": {"n_states": 3}},
}


def write_cfg(tmp_path, name, extra=None):
    d = {"schema_version": 1, "experiment": name, **(extra or {})}
    p = tmp_path / f"{name}.cfg.json"
    p.write_text(json.dumps(d))
    return p


@pytest.mark.parametrize("name", EXPERIMENTS)
def test_every_subcommand_passes(tmp_path, name):
    cfg = write_cfg(tmp_path, name, FAST.get(name))
    out = tmp_path / "out"
    assert main([name, "--config", str(cfg), "--out", str(out)]) == 0
    report = json.loads((out / f"{name}.json").read_text())
    assert report["checks"] and all(c["pass"] for c in report["checks"].values())
    assert (out / "config.json").exists()


def test_verify_algebra_all_zero(tmp_path):
    for rep in ("spin1", "spin0"):
        out = tmp_path / rep
        assert main(["verify-algebra", "--rep", rep, "--out", str(out)]) == 0
        report = json.loads((out / "verify-algebra.json").read_text())
        assert all(c["value"] == 0 for c in report["checks"].values())


def test_two_particle_swap_series(tmp_path):
    out = tmp_path / "tp"
    assert main(["two-particle", "--out", str(out), "--seed", "3"]) == 0
    report = json.loads((out / "two-particle.json").read_text())
    series = report["swap_residual_series"]
    assert series and max(max(row) for row in series) <= 1e-12


def test_tolerance_failure_exit_code(tmp_path):
    cfg = write_cfg(tmp_path, "two-particle", {"tolerances": {"swap": -1.0}})
    assert main(["two-particle", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 1
    assert main(["verify-algebra", "--out", str(tmp_path / "o2"), "--tol-scale", "0"]) == 2


@pytest.mark.parametrize("bad", [
    "{not json",
    json.dumps({"schema_version": 2}),
    json.dumps({"schema_version": 1, "bogus": 1}),
    json.dumps({"schema_version": 1, "grid": {"points": [4, 4]}}),
    json.dumps({"schema_version": 1, "rep": "spin7"}),
    json.dumps({"schema_version": 1, "tolerances": {"nope": 1}}),
    json.dumps({"schema_version": 1, "potential": {"kind": "magnetic"}}),
    json.dumps([1, 2]),
])
def test_malformed_config_exit_2(tmp_path, bad):
    p = tmp_path / "bad.json"
    p.write_text(bad)
    with pytest.raises(ConfigError):
        load_config(str(p))
    assert main(["verify-algebra", "--config", str(p), "--out", str(tmp_path / "o")]) == 2


def test_missing_config_file(tmp_path):
    assert main(["evolve", "--config", str(tmp_path / "nope.json")]) == 2


def test_config_round_trip():
    cfg = ExperimentConfig()
    d = cfg.to_dict()
    again = ExperimentConfig.from_dict(json.loads(json.dumps(d)))
    assert again.to_dict() == d
    assert set(d["tolerances"]) == set(DEFAULT_TOLERANCES)


def test_partial_tolerances_fill_defaults(tmp_path):
    p = write_cfg(tmp_path, "evolve", {"tolerances": {"mode_grid": 1e-8}})
    cfg = load_config(str(p))
    assert cfg.tolerances["mode_grid"] == 1e-8
    assert cfg.tolerances["swap"] == DEFAULT_TOLERANCES["swap"]


@pytest.mark.parametrize("name", ["evolve", "two-particle", "symmetries"])
def test_deterministic_outputs(tmp_path, name):
    cfg = write_cfg(tmp_path, name, FAST.get(name))
    a, b = tmp_path / "a", tmp_path / "b"
    assert main([name, "--config", str(cfg), "--out", str(a), "--seed", "11"]) == 0
    assert main([name, "--config", str(cfg), "--out", str(b), "--seed", "11"]) == 0
    for f in a.iterdir():
        if f.name == "config.json":
            continue
        assert f.read_bytes() == (b / f.name).read_bytes(), f.name


def test_seed_changes_output(tmp_path):
    cfg = write_cfg(tmp_path, "two-particle", FAST["two-particle"])
    main(["two-particle", "--config", str(cfg), "--out", str(tmp_path / "a"), "--seed", "1"])
    main(["two-particle", "--config", str(cfg), "--out", str(tmp_path / "b"), "--seed", "2"])
    assert (tmp_path / "a" / "two-particle.json").read_bytes() != (tmp_path / "b" / "two-particle.json").read_bytes()


def test_binary_sidecar(tmp_path):
    data = (np.arange(24) + 1j * np.arange(24)[::-1]).reshape(2, 3, 4)
    path = tmp_path / "arr.bin"
    write_array(path, data, ["a", "b", ["c0", "c1", "c2", "c3"]])
    meta = json.loads((tmp_path / "arr.bin.json").read_text())
    assert meta == {"dims": [2, 3, 4], "dtype": "<c16", "component_order": ["a", "b", ["c0", "c1", "c2", "c3"]]}
    raw = path.read_bytes()
    assert len(raw) == 24 * 16
    # interleaved little-endian (re, im) float64 pairs
    assert np.frombuffer(raw[:16], dtype="<f8").tolist() == [0.0, 23.0]
    assert np.array_equal(read_array(path), data)


def test_evolve_writes_arrays(tmp_path):
    cfg = write_cfg(tmp_path, "evolve", FAST["evolve"])
    out = tmp_path / "ev"
    assert main(["evolve", "--config", str(cfg), "--out", str(out), "--rep", "spin0"]) == 0
    arr = read_array(out / "final_state.bin")
    assert arr.shape == (4, 4, 4, 4, 5)
    rows = (out / "quasi_norm.csv").read_text().splitlines()
    assert len(rows) == 1 + 4 + 1


def test_exchange_phase_flags(tmp_path):
    out = tmp_path / "ex"
    assert main(["exchange-phase", "--spin", "half", "--out", str(out)]) == 0
    report = json.loads((out / "exchange-phase.json").read_text())
    assert report["factor"] == [-1.0, 0.0] and report["verdict"] == "antisymmetric"
    assert main(["exchange-phase", "--spin", "1", "--l", "3/2", "--out", str(out)]) == 2


def test_symmetries_subset(tmp_path):
    out = tmp_path / "sym"
    assert main(["symmetries", "--check", "C", "TPC", "--out", str(out), "--rep", "dirac"]) == 0
    report = json.loads((out / "symmetries.json").read_text())
    assert set(report["table"]) == {"C", "TPC"}


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "dkpsim", "verify-algebra", "--out", str(tmp_path)],
                         capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
