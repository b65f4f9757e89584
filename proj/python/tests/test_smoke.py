import json
import math
import os
import pathlib
import subprocess

import jsonschema
import pytest

import mwstats

CLI = os.environ.get("MWSTATS_CLI", "mwstats")
SCHEMA_DIR = pathlib.Path(os.environ.get("MWSTATS_SCHEMA_DIR", pathlib.Path(__file__).parents[2] / "schemas"))


def load_schema(name):
    return json.loads((SCHEMA_DIR / f"{name}.schema.json").read_text())


def cli(*args, cwd=None):
    return subprocess.run([CLI, *args], capture_output=True, text=True, cwd=cwd)


def test_core_functions():
    assert mwstats.__version__
    assert mwstats.photon_variance("thermal", 1.0) == pytest.approx(2.0)
    assert mwstats.photon_variance("coherent", 1.0) == pytest.approx(1.0)
    assert mwstats.analytic_moments("thermal", 1.0)["2,2"] == pytest.approx(2.0)
    assert mwstats.symmetrized_moments("vacuum", 0.0)["1,1"] == pytest.approx(0.5)
    assert mwstats.dispersive_shift(67e6, 850e6, -315e6) == pytest.approx(-3.11e6, rel=0.01)
    assert mwstats.critical_photons(850e6, 67e6) == pytest.approx(40, rel=0.02)
    assert mwstats.dephasing_rate("coherent", 0.7) == pytest.approx(2 * mwstats.dephasing_rate("shot", 0.7))
    assert mwstats.jpa_polynomial(60, 0.66)["xi"] == pytest.approx(6.64, rel=1e-5)
    mean, var = mwstats.amplify(0.5, 0.0, 1.0)
    assert mwstats.g2_unnormalized(mean, var) == pytest.approx(2 * 0.25)
    assert mwstats.compression_power_dbm(14.9e6, 0.59) == pytest.approx(-129, abs=0.3)
    assert mwstats.wigner_gaussian_contour(1.0) / mwstats.wigner_gaussian_contour(0.0) == pytest.approx(math.sqrt(3))
    n = mwstats.bose_einstein(6.07e9, 0.2)
    assert mwstats.effective_temperature(6.07e9, n) == pytest.approx(0.2)


def test_config_and_schemas():
    cfg = mwstats.default_config()
    jsonschema.validate(cfg, load_schema("config"))
    assert set(mwstats.experiment_names()) >= {"ramsey_sweep", "dualpath_sweep", "jpa_sweep"}
    for name in mwstats.schema_names():
        assert mwstats.schema(name) == load_schema(name)
    with pytest.raises(KeyError):
        mwstats.schema("nope")


def test_run_in_memory():
    results, files = mwstats.run_experiment("jpa_sweep", jpa={"noise_statistics": "thermal", "n_n": 0.66})
    jsonschema.validate(results, load_schema("results"))
    assert results["variants"]["thermal"]["xi"] == pytest.approx(6.64)
    assert files["jpa_sweep.csv"].splitlines()[0].startswith(b"n_jpa") or b"," in files["jpa_sweep.csv"]
    jsonschema.validate(json.loads(files["fits.json"]), load_schema("fits"))
    with pytest.raises(mwstats.ConfigError):
        mwstats.run_experiment("jpa_sweep", jpa={"bogus": 1})


def test_cli_run_report_and_schema(tmp_path):
    out = tmp_path / "quad"
    r = cli("run", "quadrature_check", "--samples", "100000", "-o", str(out))
    assert r.returncode == 0, r.stderr
    for name in ("manifest", "results", "fits"):
        jsonschema.validate(json.loads((out / f"{name}.json").read_text()), load_schema(name))
    assert (out / "quadrature.csv").read_text().splitlines()[0].count(",") > 0

    r = cli("report", str(out))
    assert r.returncode == 0, r.stderr
    assert "PASS" in r.stdout
    report = json.loads((out / "report.json").read_text())
    jsonschema.validate(report, load_schema("report"))
    assert report["all_pass"]

    # Same seed: byte-identical tables.
    again = tmp_path / "quad2"
    assert cli("run", "quadrature_check", "--samples", "100000", "-o", str(again)).returncode == 0
    assert (out / "quadrature.csv").read_bytes() == (again / "quadrature.csv").read_bytes()

    r = cli("schema", "manifest")
    assert r.returncode == 0
    assert json.loads(r.stdout) == load_schema("manifest")


def test_cli_dualpath_record_export(tmp_path):
    out = tmp_path / "dp"
    r = cli("run", "dualpath_sweep", "--samples", "20000", "--n-points", "4",
            "--set", "dualpath.export_record=true", "-o", str(out))
    assert r.returncode == 0, r.stderr
    side = json.loads((out / "record.json").read_text())
    jsonschema.validate(side, load_schema("record_sidecar"))
    assert (out / "record.bin").stat().st_size == side["N"] * 32
    jsonschema.validate(json.loads((out / "moments.json").read_text()), load_schema("moments_table"))


def test_cli_exit_codes(tmp_path):
    assert cli("run", "nonsense", "-o", str(tmp_path / "x")).returncode == 1
    assert cli("run", "jpa_sweep", "--shots", "10", "-o", str(tmp_path / "y")).returncode == 1
    assert cli("run", "jpa_sweep", "--set", "jpa.n_n=-1", "-o", str(tmp_path / "z")).returncode == 1
    bad = tmp_path / "bad.json"
    bad.write_text('{\n  "seed": 1,\n  oops\n}\n')
    r = cli("run", "jpa_sweep", "-c", str(bad), "-o", str(tmp_path / "w"))
    assert r.returncode == 1
    assert "bad.json:3:" in r.stderr
    assert not (tmp_path / "x").exists()
    r = cli("report", str(tmp_path))
    assert r.returncode != 0
    assert "manifest.json" in r.stderr
    assert cli("--bogus-flag").returncode == 1
    # Degenerate Planck sweep: numerical failure.
    r = cli("run", "planck_calibration", "--set", "planck.t_min_k=0.5", "--set", "planck.t_max_k=0.5001",
            "-o", str(tmp_path / "p"))
    assert r.returncode == 2, r.stderr
