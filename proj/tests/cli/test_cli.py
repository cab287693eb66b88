"""End-to-end checks of the respan command-line tool.

The binary under test comes from RESPAN_BIN (set by ctest), falling back to
build/respan in the source tree.
"""

import csv
import json
import os
import subprocess
import sys
from pathlib import Path

import jsonschema
import pytest

ROOT = Path(__file__).resolve().parents[2]
BIN = os.environ.get("RESPAN_BIN", str(ROOT / "build" / "respan"))
SCHEMAS = ROOT / "schemas"
HIGHS = f"{sys.executable} {ROOT / 'tools' / 'highs_solve.py'} {{mps}} {{sol}}"


def respan(*args, check=True):
    proc = subprocess.run([BIN, *map(str, args)], capture_output=True, text=True)
    if check and proc.returncode != 0:
        raise AssertionError(f"respan {' '.join(map(str, args))} exited {proc.returncode}:\n{proc.stderr}")
    return proc


def schema(name):
    return json.loads((SCHEMAS / f"{name}.schema.json").read_text())


def write_spec(path, **overrides):
    spec = {"seed": 7, "n_buses": 2, "horizon": 24,
            "techs": {"W_on": {"per_bus": 2, "kappa_max": [20, 40], "zeta": [95000, 125000]},
                      "PV_u": {"per_bus": 1, "kappa_max": [20, 40], "zeta": [45000, 60000]}}}
    spec.update(overrides)
    path.write_text(json.dumps(spec))
    return path


@pytest.fixture
def instance(tmp_path):
    out = tmp_path / "inst"
    respan("gen", "-s", write_spec(tmp_path / "spec.json"), "-o", out)
    return out


def read_csv(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


def test_gen_writes_manifest_and_is_repeatable(tmp_path):
    spec = write_spec(tmp_path / "spec.json")
    a, b = tmp_path / "a", tmp_path / "b"
    respan("gen", "-s", spec, "-o", a)
    respan("gen", "-s", spec, "-o", b)
    respan("gen", "-s", spec, "-o", b)
    names = {"buses.csv", "lines.csv", "sites.csv", "cf.csv", "demand.csv", "gens.csv", "storage.csv", "params.json"}
    assert {p.name for p in a.iterdir()} == names
    for n in names:
        assert (a / n).read_bytes() == (b / n).read_bytes(), n
    jsonschema.validate(json.loads((a / "params.json").read_text()), schema("instance_params"))


@pytest.mark.parametrize("bad", [{"horizon": 5}, {"n_busses": 3}, {"topology": "mesh"}])
def test_gen_rejects_bad_specs(tmp_path, bad):
    proc = respan("gen", "-s", write_spec(tmp_path / "spec.json", **bad), "-o", tmp_path / "x", check=False)
    assert proc.returncode == 2
    assert proc.stderr.strip()


def test_run_flp_outputs(instance, tmp_path):
    out = tmp_path / "flp"
    respan("run-flp", "-i", instance, "-o", out)
    rec = json.loads((out / "flp_run.json").read_text())
    jsonschema.validate(rec, schema("run_record"))
    assert rec["model"] == "FLP" and rec["status"] == "Optimal"
    assert rec["residuals"]["max"] <= 1e-6
    rows = read_csv(out / "design.csv")
    assert {r["kind"] for r in rows} >= {"site", "line"}
    first = (out / "design.csv").read_bytes()
    respan("run-flp", "-i", instance, "-o", out)
    assert (out / "design.csv").read_bytes() == first


def test_external_solver_matches_reference(instance, tmp_path):
    respan("run-flp", "-i", instance, "-o", tmp_path / "ref")
    respan("run-flp", "-i", instance, "-o", tmp_path / "ext", "--solver-command", HIGHS)
    ref = json.loads((tmp_path / "ref" / "flp_run.json").read_text())
    ext = json.loads((tmp_path / "ext" / "flp_run.json").read_text())
    assert ext["solver"] == "external-mps"
    assert abs(ref["objective"] - ext["objective"]) <= 1e-6 * abs(ref["objective"])


def test_run_sm_outputs_validate(instance, tmp_path):
    out = tmp_path / "sm"
    respan("run-sm", "-i", instance, "-o", out, "--xi", "0.5", "--delta-tau", "12")
    site = json.loads((out / "site_run.json").read_text())
    rlp = json.loads((out / "rlp_run.json").read_text())
    jsonschema.validate(site, schema("run_record"))
    jsonschema.validate(rlp, schema("run_record"))
    assert site["screening"]["xi_overridden"] and site["screening"]["delta_tau"] == 12
    assert len(read_csv(out / "retained.csv")) == site["screening"]["retained_count"]


def test_full_target_with_tight_potentials_retains_every_site(tmp_path):
    # tiny potentials against large demand: every site must be built out
    spec = write_spec(tmp_path / "spec.json", demand_base=1000,
                      techs={"W_on": {"per_bus": 3, "kappa_max": [2, 4], "zeta": [95000, 125000]},
                             "PV_u": {"per_bus": 2, "kappa_max": [2, 4], "zeta": [45000, 60000]}})
    inst = tmp_path / "inst"
    respan("gen", "-s", spec, "-o", inst)
    out = tmp_path / "sm"
    respan("run-sm", "-i", inst, "-o", out, "--xi", "1")
    retained = {r["site_id"] for r in read_csv(out / "retained.csv")}
    assert retained == {r["id"] for r in read_csv(inst / "sites.csv")}


def test_estimate_params_finds_daily_period(tmp_path):
    spec = write_spec(tmp_path / "spec.json", horizon=168,
                      techs={"PV_u": {"per_bus": 3, "kappa_max": [20, 40], "zeta": [45000, 60000]}})
    inst = tmp_path / "inst"
    respan("gen", "-s", spec, "-o", inst)
    out = tmp_path / "est"
    proc = respan("estimate-params", "-i", inst, "-o", out)
    params = json.loads((out / "params.json").read_text())
    jsonschema.validate(params, schema("params"))
    assert params["delta_tau"] == 24
    assert json.loads(proc.stdout) == params
    # the written file feeds straight back into run-sm
    respan("run-sm", "-i", inst, "-o", tmp_path / "sm", "-p", out / "params.json")


def test_compare_identical_runs(instance, tmp_path):
    respan("run-flp", "-i", instance, "-o", tmp_path / "flp")
    respan("run-sm", "-i", instance, "-o", tmp_path / "sm", "--retain-all", "--delta-tau", "12")
    out = tmp_path / "cmp"
    respan("compare", "--flp", tmp_path / "flp", "--sm", tmp_path / "sm", "-o", out)
    rep = json.loads((out / "report.json").read_text())
    jsonschema.validate(rep, schema("report"))
    assert rep["tsce"] == 0.0
    for key in ("variables", "constraints", "nonzeros"):
        assert rep["deltas"][key] == 0.0
    assert all(c["diff"] == 0.0 for c in rep["capacity_deltas"])
    assert all(t["gamma"] == 0.0 for t in rep["techs"])
    assert read_csv(out / "distances.csv") is not None
    assert (out / "capacities.csv").read_text().startswith("tech,flp_site,rlp_site,flp_mw,rlp_mw,common")


def test_exit_codes(instance, tmp_path):
    assert respan("run-flp", "-i", tmp_path / "missing", "-o", tmp_path / "o", check=False).returncode == 4
    assert respan("run-sm", "-i", instance, "-o", tmp_path / "o", "--xi", "1.5", check=False).returncode == 2
    failing = respan("run-flp", "-i", instance, "-o", tmp_path / "o", "--solver-command", "false", check=False)
    assert failing.returncode == 3
    assert failing.stderr.strip()
    (instance / "demand.csv").write_text("t,B1\n0,oops\n")
    assert respan("run-flp", "-i", instance, "-o", tmp_path / "o", check=False).returncode == 2


def test_help_lists_flags():
    proc = respan("run-sm", "--help")
    for flag in ("--xi", "--delta-tau", "--retain-all", "--solver-command", "--params"):
        assert flag in proc.stdout
    assert "REsPAN_THREADS" in proc.stdout
