import json
import os

import numpy as np

from orbicli.orbiexecute import OrbiExecute
from orbicli.report import emit, format_csv, plain, read_report, to_json
from orbicli.scenario import load_scenario

NUMERICS = {
    "cluster_tolerance": 1e-9,
    "fixed_tolerance": 1e-9,
    "symmetry_tolerance": 1e-10,
    "max_sector_dimension": 2000,
    "h2_candidate_limit": 1 << 20,
    "scale_grid_points": 5,
    "beta_grid_points": 5,
}


def run(name, stages=None):
    return OrbiExecute(load_scenario(name), NUMERICS).run(stages)


def read_lines(path):
    with open(path) as f:
        return f.read().splitlines()


def test_plain():
    value = plain({"a": np.arange(2), "b": 1 + 2j, "c": np.bool_(True), 3: (np.float64(0.5),)})
    assert value == {"a": [0, 1], "b": [1.0, 2.0], "c": True, "3": [0.5]}
    assert type(value["c"]) is bool


def test_format_csv():
    text = format_csv(("x", "y"), [(1, 0.5), (2, True)])
    assert text.splitlines() == ["x,y", "1,0.5", "2,True"]


def test_json_report(tmpdir):
    report = run("z2_circle8", ["sectors", "spectra"])
    written = emit(report, str(tmpdir), "json")
    assert written == [os.path.join(str(tmpdir), "report.json")]
    data = read_report(written[0])
    assert data["tool"]["name"] == "orbicli"
    assert data["scenario"]["name"] == "z2_circle8"
    assert len(data["scenario"]["hash"]) == 64
    assert list(data["stages"]) == ["sectors", "spectra"]
    assert data == json.loads(to_json(report))


def test_csv_bundle(tmpdir):
    report = run("z2xz2_torus4", ["flow", "observables"])
    written = emit(report, str(tmpdir), "csv")
    names = [os.path.basename(p) for p in written]
    assert names == ["spectra.csv", "flow.csv", "partition.csv", "manifest.json"]

    partition = read_lines(str(tmpdir.join("partition.csv")))
    assert partition[0] == "beta,Z,Z[0],Z[1],Z[2],Z[3]"
    assert len(partition) == 1 + 5

    spectra = read_lines(str(tmpdir.join("spectra.csv")))
    assert spectra[0] == "sector,mode_index,eigenvalue,cluster_id,multiplicity,invariant"
    assert len(spectra) == 1 + 16 + 4 + 4 + 4

    flow = read_lines(str(tmpdir.join("flow.csv")))
    assert flow[0].split(",")[:3] == ["scale", "cutoff", "retained [0]"]

    manifest = read_report(str(tmpdir.join("manifest.json")))
    assert manifest["files"] == ["spectra.csv", "flow.csv", "partition.csv"]
    assert manifest["stages"] == ["sectors", "spectra", "flow", "observables"]


def test_manifest_only_bundle(tmpdir):
    report = run("toy_c_z2", ["toy"])
    written = emit(report, str(tmpdir), "csv")
    assert [os.path.basename(p) for p in written] == ["manifest.json"]
    manifest = read_report(written[0])
    assert manifest["files"] == []
    assert manifest["scenario"]["name"] == "toy_c_z2"


def test_emit_creates_directory(tmpdir):
    out = str(tmpdir.join("nested", "out"))
    emit(run("trivial_circle8", ["sectors"]), out, "json")
    assert os.path.exists(os.path.join(out, "report.json"))


def test_reports_are_byte_identical(tmpdir):
    first, second = tmpdir.mkdir("first"), tmpdir.mkdir("second")
    for out in (first, second):
        emit(run("z4_torus4", ["flow", "observables"]), str(out), "csv")
    for name in ("spectra.csv", "flow.csv", "partition.csv", "manifest.json"):
        assert first.join(name).read() == second.join(name).read()
