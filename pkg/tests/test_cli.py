import json

import pytest

from conftest import fixture_path, model, pipeline, read_doc
from mhalgebroid.cli import main
from mhalgebroid.crossed_models import swap_action_model
from mhalgebroid.registry import ALL_CHECKS


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def write(tmp_path, doc, name="m.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc) if not isinstance(doc, str) else doc)
    return str(p)


def test_verify_z2_passes(capsys):
    code, out, _ = run(capsys, "verify", fixture_path("z2_group"))
    assert code == 0
    assert "FAIL" not in out
    assert "[Regular multiplier Hopf algebroids]" in out and "[Duality]" in out


def test_broken_coassociativity_first_failure(capsys):
    code, out, _ = run(capsys, "verify", "--format", "json", fixture_path("broken_coassoc"))
    assert code == 1
    rep = json.loads(out)
    first = next(c for c in rep["checks"] if not c["pass"])
    assert first["name"] == "left-comult-coass"
    assert rep["summary"]["regular"] is False


def test_check_filter_runs_only_biduality(capsys):
    code, out, _ = run(capsys, "verify", "--check", "biduality", "--format", "json", fixture_path("z2_group"))
    assert code == 0
    rep = json.loads(out)
    assert [c["name"] for c in rep["checks"]] == ["biduality"]


def test_check_filter_skips_later_stages(capsys, monkeypatch):
    import mhalgebroid.duality as duality

    def boom(*a, **k):
        raise AssertionError("duality should not run")
    monkeypatch.setattr(duality, "verify_duality", boom)
    code, out, _ = run(capsys, "verify", "--check", "regular", fixture_path("pair2"))
    assert code == 0 and "PASS regular" in out


def test_unknown_check_is_input_error(capsys):
    code, _, err = run(capsys, "verify", "--check", "no-such-check", fixture_path("z2_group"))
    assert code == 2 and "unknown check" in err


def test_json_is_byte_stable(capsys, tmp_path):
    outs = []
    for i in range(2):
        p = str(tmp_path / f"r{i}.json")
        assert main(["verify", "--format", "json", "--out", p, fixture_path("pair2_weighted")]) == 0
        outs.append(open(p, "rb").read())
    assert outs[0] == outs[1]
    assert main(["dualize", "--out", str(tmp_path / "d0"), fixture_path("z2_group")]) == 0
    assert main(["dualize", "--out", str(tmp_path / "d1"), fixture_path("z2_group")]) == 0
    assert (tmp_path / "d0").read_bytes() == (tmp_path / "d1").read_bytes()


def test_dualize_z2_gives_group_algebra(capsys):
    code, out, _ = run(capsys, "dualize", fixture_path("z2_group"))
    assert code == 0
    d = json.loads(out)
    assert d["basis"] == ["e.phi", "g.phi"]
    assert sorted(map(tuple, d["mult"])) == [(0, 0, 0, "1"), (0, 1, 1, "1"), (1, 0, 1, "1"), (1, 1, 0, "1")]
    assert set(d) >= {"basis", "mult", "embeddings", "canonical_ranks", "integrals", "checks"}


def test_bidual_z2_identity(capsys):
    code, out, _ = run(capsys, "bidual", fixture_path("z2_group"))
    assert code == 0
    d = json.loads(out)
    assert d["isomorphic"] is True
    assert d["relabeling"] == [["1", "0"], ["0", "1"]]


def test_dualize_unmeasured_raw_model(capsys):
    code, _, err = run(capsys, "dualize", fixture_path("raw_unmeasured"))
    assert code == 1
    assert "integral" in err


def test_raw_model_with_weight_dualizes(capsys, tmp_path):
    doc = read_doc("raw_unmeasured")
    doc["payload"]["base_weight"] = {"mu_B": ["1"], "mu_C": ["1"]}
    code, out, _ = run(capsys, "verify", write(tmp_path, doc))
    assert code == 0, out


@pytest.mark.parametrize("doc,msg", [
    ("{not json", "not valid JSON"),
    ({"kind": "groupoid"}, "payload"),
    ({"kind": "sheaf", "payload": {}}, "kind"),
    ({"kind": "groupoid", "payload": {"units": ["x"], "measure": {"x": "1+i"}}}, "Qi"),
    ({"kind": "groupoid", "payload": {"units": ["x"], "measure": {"x": "abc"}}}, "not a scalar"),
    ({"kind": "groupoid", "payload": {"units": ["x"]}, "options": {"scalars": "R"}}, "scalar field"),
    ({"kind": "raw_algebroid", "payload": {"algebra": {"labels": ["a"], "mult": []}}}, "malformed"),
    ({"kind": "crossed_product", "payload": {"group": {"elements": ["e"], "table": [[0]]},
                                             "B": {"labels": ["p"], "mult": [[0, 0, 0, "1"]]},
                                             "S_B": [["1"]], "mu_B": ["1"]}}, "right_action"),
])
def test_input_errors_exit_2(capsys, tmp_path, doc, msg):
    code, _, err = run(capsys, "verify", write(tmp_path, doc))
    assert code == 2
    assert msg in err


def test_missing_file_and_bad_flag(capsys):
    assert run(capsys, "verify", "/nonexistent/model.json")[0] == 2
    assert run(capsys, "verify", "--format", "xml", fixture_path("z2_group"))[0] == 2


def test_gaussian_scalars_accepted_with_flag(capsys, tmp_path):
    doc = {"kind": "groupoid", "payload": {"units": ["x"], "measure": {"x": "2"}}}
    p = write(tmp_path, doc)
    assert run(capsys, "verify", "--scalars", "Qi", p)[0] == 0


def test_nonpositive_measure_is_a_mathematical_failure(capsys, tmp_path):
    doc = read_doc("pair2")
    doc["payload"]["measure"] = {"1": "1", "2": "-1"}
    code, out, _ = run(capsys, "verify", write(tmp_path, doc))
    assert code == 1 and "FAIL base-weight" in out


def test_crossed_fixture_matches_builtin_model():
    m = model("swap_crossed")
    Hf, D = swap_action_model()
    assert m.built["D"].right_action == D.right_action
    assert m.built["D"].left_action == D.left_action
    assert m.built["H"].H.to_json()["mult"] == Hf.H.to_json()["mult"]


def test_registry_is_exactly_covered():
    # every registered name is produced by some pipeline, and nothing else is
    seen = set()
    for name in ("z2_group", "swap_crossed"):
        seen |= {c.name for c in pipeline(name).report.checks}
    assert seen == set(ALL_CHECKS)
