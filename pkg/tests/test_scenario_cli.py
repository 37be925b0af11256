import copy
import json
import os
import subprocess
import sys

import pytest

from conftest import GOOD, scenario_spec
from heckecross import cli
from heckecross.errors import AxiomError, SchemaError
from heckecross.scenario import STAGES, bundled_fixtures, load_fixture, load_spec

BASE = scenario_spec(
    {"symmetric": 3}, {"generators": ["(1,2,3)"]}, {"constructor": "pair", "size": 3}, {"kind": "diagonal"}
)


def test_bundled_fixtures_present():
    names = set(bundled_fixtures())
    assert set(GOOD) | {"bad_flip", "bad_intersection"} <= names


def test_point_and_transformation_fixtures_load():
    sc = load_fixture("point_s3")
    assert sc.group.order == 6 and len(sc.gamma) == 2
    assert sc.system.groupoid.n == 1
    sc = load_fixture("transf_s3")
    assert sc.system.free and sc.system.groupoid.n == 36


def test_minimal_spec_builds(build):
    sc = build(BASE)
    assert sc.system.groupoid.n == 9
    assert sc.name == "scenario"


@pytest.mark.parametrize(
    "mutate",
    [
        lambda s: s.update(extra=1),
        lambda s: s["group"].update(order=3),
        lambda s: s["action"].update(colour="red"),
        lambda s: s.pop("gamma"),
        lambda s: s.update(schema=2),
        lambda s: s.update(representation="gns"),
        lambda s: s["action"].update(kind="spin"),
        lambda s: s["bundle"].pop("dims"),
    ],
    ids=["top", "group", "action", "missing", "schema", "representation", "kind", "dims"],
)
def test_schema_errors(build, mutate):
    spec = copy.deepcopy(BASE)
    mutate(spec)
    with pytest.raises(SchemaError):
        build(spec)


def test_stages_fail_in_order(build):
    bad_group = copy.deepcopy(BASE)
    bad_group["group"] = {"cayley": [[0, 1], [1, 1]]}
    with pytest.raises(AxiomError) as exc:
        build(bad_group)
    assert exc.value.stage == "group"
    bad_sub = copy.deepcopy(BASE)
    bad_sub["gamma"] = {"members": ["()", "(1,2)", "(2,3)"]}
    with pytest.raises(AxiomError) as exc:
        build(bad_sub)
    assert exc.value.stage == "subgroup"
    bad_action = copy.deepcopy(BASE)
    bad_action["action"] = {"kind": "table", "table": [[0] * 6] * 8 + [[1] * 6]}
    with pytest.raises(AxiomError) as exc:
        build(bad_action)
    assert exc.value.stage == "action"
    assert STAGES.index("group") < STAGES.index("gamma_good") < STAGES.index("gamma_intersection")


def test_bad_fixtures_fail_at_the_right_stage():
    with pytest.raises(AxiomError) as exc:
        load_fixture("bad_flip")
    assert exc.value.stage == "gamma_good"
    assert tuple(exc.value.witness) == (1, 1)
    with pytest.raises(AxiomError) as exc:
        load_fixture("bad_intersection")
    assert exc.value.stage == "gamma_intersection"
    assert tuple(exc.value.witness) == (0, 1)


def run(capsys, *argv):
    code = cli.main(list(argv))
    return code, capsys.readouterr()


def test_check_action_exit_codes(capsys):
    code, out = run(capsys, "check-action", "bad_intersection.json")
    assert code == 1
    assert "gamma_intersection: FAIL" in out.out
    assert "'g': '(2,3)'" in out.out
    code, out = run(capsys, "check-action", "bad_flip.json")
    assert code == 1 and "gamma_good: FAIL" in out.out
    code, out = run(capsys, "check-action", "point_s3.json")
    assert code == 0 and "gamma_intersection: pass" in out.out


def test_other_commands_refuse_invalid_scenarios(capsys):
    code, out = run(capsys, "verify-identities", "bad_flip.json")
    assert code == 1 and "gamma_good" in out.out


def test_missing_file_and_bad_json(capsys, tmp_path):
    code, out = run(capsys, "hecke-table", str(tmp_path / "nope.json"))
    assert code == 2 and "not found" in out.err
    bad = tmp_path / "bad.json"
    bad.write_text("{", encoding="utf-8")
    code, out = run(capsys, "hecke-table", str(bad))
    assert code == 2


def test_hecke_table_csv(capsys):
    code, out = run(capsys, "hecke-table", "point_s3.json")
    assert code == 0
    lines = out.out.splitlines()
    assert lines[0] == "left,right,product"
    assert '"Γ(2,3)Γ","Γ(2,3)Γ","2*Γ()Γ + 1*Γ(2,3)Γ"' in lines


def test_report_json_written(capsys, tmp_path):
    code, out = run(capsys, "product-oracle", "transf_s3.json", "--out", str(tmp_path))
    assert code == 0
    report = json.loads((tmp_path / "transf_s3.product-oracle.json").read_text(encoding="utf-8"))
    assert report["ok"] is True
    code, _ = run(capsys, "crossed-table", "normal_s3a3.json", "--out", str(tmp_path), "--format", "json")
    assert code == 0 and (tmp_path / "normal_s3a3.crossed-table.json").exists()


def test_gaussian_formatting_in_tables(capsys):
    code, out = run(capsys, "crossed-table", "transf_s3_dims2.json")
    assert code == 0
    assert any("*i" in line for line in out.out.splitlines()[1:])


@pytest.mark.parametrize("cmd", ["crossed-table", "verify-identities"])
def test_output_is_independent_of_thread_count(cmd, tmp_path):
    outs = []
    for threads in ("1", "4"):
        d = tmp_path / threads
        env = dict(os.environ, HX_THREADS=threads)
        subprocess.run(
            [sys.executable, "-m", "heckecross.cli", cmd, "transf_s3.json", "--out", str(d)],
            env=env, check=True, capture_output=True,
        )
        outs.append(next(d.iterdir()).read_bytes())
    assert outs[0] == outs[1]


def test_bad_thread_setting(monkeypatch, capsys):
    monkeypatch.setenv("HX_THREADS", "many")
    code, out = run(capsys, "verify-identities", "point_s3.json")
    assert code == 2


def test_spec_round_trip_through_json(tmp_path, build):
    spec = load_spec("transf_s3_dims2.json")
    path = tmp_path / "copy.json"
    path.write_text(json.dumps(spec), encoding="utf-8")
    sc = build(load_spec(path))
    assert sc.system.dim == load_fixture("transf_s3_dims2").system.dim
