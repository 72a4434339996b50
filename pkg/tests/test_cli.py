from __future__ import annotations

import json

import pytest

from interlace.main import main


def run(capsys, *argv: str) -> tuple[int, dict, str]:
    code = main(list(argv))
    captured = capsys.readouterr()
    payload = json.loads(captured.out) if captured.out.strip() else {}
    return code, payload, captured.err


@pytest.fixture
def metric_file(tmp_path):
    path = tmp_path / "metric.json"
    path.write_text(json.dumps({"labels": ["p", "q"], "dist": [["0", "2"], ["2", "0"]]}))
    return path


def test_dist_prints_compact_json(capsys):
    assert main(["dist", "--a", "1,3", "--b", "2,4"]) == 0
    assert capsys.readouterr().out.strip() == '{"d":1,"adjacent":true}'


@pytest.mark.parametrize(
    ("a", "b", "expected"),
    [("", "5", {"d": 1, "adjacent": True}), ("1,2", "1,2", {"d": 0, "adjacent": False})],
)
def test_dist_examples(capsys, a, b, expected):
    code, payload, _ = run(capsys, "dist", "--a", a, "--b", b)
    assert code == 0
    assert payload == expected


def test_dist_with_oracle(capsys):
    _, payload, _ = run(capsys, "dist", "--a", "1,2", "--b", "3,4", "--oracle")
    assert payload == {"d": 2, "adjacent": False, "bfs": 2}


def test_oracle_disagreement_is_reported_as_json(capsys, monkeypatch):
    monkeypatch.setattr("interlace.services.interlacing_service.bfs_distance", lambda *args, **kwargs: 5)
    code, payload, err = run(capsys, "dist", "--a", "1,2", "--b", "3,4", "--oracle")
    assert code == 1
    assert payload == {}
    error = json.loads(err.strip().splitlines()[-1])
    assert error["error"] == "INTERNAL_CHECK_FAILED"
    assert "disagrees" in error["detail"]


def test_bad_set_is_a_usage_error(capsys):
    assert main(["dist", "--a", "3,1", "--b", "2"]) == 2


def test_geodesic_keeps_cardinality(capsys):
    code, payload, _ = run(capsys, "geodesic", "--a", "1,2,3", "--b", "2,3,4")
    assert code == 0
    assert payload["length"] == 1
    assert payload["path"][0] == "1,2,3" and payload["path"][-1] == "2,3,4"
    assert all(len(vertex.split(",")) == 3 for vertex in payload["path"])


def test_lift(capsys):
    _, payload, _ = run(capsys, "lift", "--sets", "1,3", "2,4", "--m", "3")
    assert payload == {"m": 3, "sets": ["1,3,5", "2,4,5"]}


def test_lift_mismatch_reports_domain_error(capsys):
    code, _, err = run(capsys, "lift", "--sets", "1", "2,4", "--m", "3")
    assert code == 1
    assert json.loads(err.strip().splitlines()[-1])["error"] == "CARDINALITY_MISMATCH"


def test_sweep(capsys):
    code, payload, _ = run(capsys, "sweep", "--universe", "4")
    assert code == 0
    assert payload["passed"] and payload["mismatches"] == []


def test_embed_two_point_metric(capsys, metric_file, tmp_path):
    output = tmp_path / "result.json"
    code, payload, _ = run(
        capsys, "embed", "--input", str(metric_file), "--epsilon", "1/2", "--verify", "--output", str(output)
    )
    assert code == 0
    assert payload["k"] == 7
    assert payload["scale"] == "2"
    assert payload["certified"]
    assert payload["report"]["passed"]
    assert payload["sets"] == {"p": [1, 2, 3, 8, 9, 10, 11], "q": [1, 4, 5, 6, 7, 8, 9]}
    assert json.loads(output.read_text())["sets"] == payload["sets"]


@pytest.mark.parametrize("epsilon", ["2", "0", "abc"])
def test_embed_rejects_bad_epsilon(capsys, metric_file, epsilon):
    assert main(["embed", "--input", str(metric_file), "--epsilon", epsilon]) == 2


def test_embed_reports_invalid_metrics(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(
        json.dumps({"labels": ["a", "b", "c"], "dist": [["0", "1", "3"], ["1", "0", "1"], ["3", "1", "0"]]})
    )
    code, _, err = run(capsys, "embed", "--input", str(path), "--epsilon", "1/2")
    assert code == 1
    error = json.loads(err.strip().splitlines()[-1])
    assert error["error"] == "TRIANGLE_VIOLATION"
    assert error["witness"] == ["a", "b", "c"]


def test_verify_accepts_a_stored_result(capsys, metric_file, tmp_path):
    output = tmp_path / "result.json"
    main(["embed", "--input", str(metric_file), "--epsilon", "1/2", "--output", str(output)])
    capsys.readouterr()
    code, payload, _ = run(capsys, "verify", "--input", str(metric_file), "--result", str(output))
    assert code == 0
    assert payload["passed"]


def test_verify_rejects_a_tampered_result(capsys, metric_file, tmp_path):
    output = tmp_path / "result.json"
    main(["embed", "--input", str(metric_file), "--epsilon", "1/2", "--output", str(output)])
    capsys.readouterr()
    stored = json.loads(output.read_text())

    stored["sets"]["p"] = stored["sets"]["p"][:-1]
    output.write_text(json.dumps(stored))
    code, _, err = run(capsys, "verify", "--input", str(metric_file), "--result", str(output))
    assert code == 1
    assert "CARDINALITY_NONUNIFORM" in err


def test_verify_reports_a_wrong_scale(capsys, metric_file, tmp_path):
    output = tmp_path / "result.json"
    main(["embed", "--input", str(metric_file), "--epsilon", "1/2", "--output", str(output)])
    capsys.readouterr()
    stored = json.loads(output.read_text())

    stored["scale"] = "1"
    output.write_text(json.dumps(stored))
    code, payload, _ = run(capsys, "verify", "--input", str(metric_file), "--result", str(output))
    assert code == 1
    assert not payload["passed"]
    assert payload["violations"] == 1


@pytest.mark.parametrize(
    ("field", "value", "error"),
    [("epsilon", "1", "EPSILON_OUT_OF_RANGE"), ("epsilon", "0", "EPSILON_OUT_OF_RANGE"), ("scale", "0", "INVALID_SCALE")],
)
def test_verify_rejects_tampered_parameters(capsys, metric_file, tmp_path, field, value, error):
    output = tmp_path / "result.json"
    main(["embed", "--input", str(metric_file), "--epsilon", "1/2", "--output", str(output)])
    capsys.readouterr()
    stored = json.loads(output.read_text())

    stored["sets"]["q"] = [1, 2, 3, 8, 9, 10, 12]
    stored[field] = value
    output.write_text(json.dumps(stored))
    code, payload, err = run(capsys, "verify", "--input", str(metric_file), "--result", str(output))
    assert code == 1
    assert payload == {}
    assert json.loads(err.strip().splitlines()[-1])["error"] == error


def test_embed_with_a_lifted_target_is_certified(capsys, metric_file):
    code, payload, _ = run(
        capsys, "embed", "--input", str(metric_file), "--epsilon", "1/2", "--target-k", "20", "--verify"
    )
    assert code == 0
    assert payload["k"] == 20
    assert payload["base_k"] == 7
    assert payload["certified"]
    assert payload["report"]["passed"]


def test_random_metric(capsys, tmp_path):
    code, payload, _ = run(capsys, "random-metric", "--n", "4", "--seed", "3", "--even")
    assert code == 0
    assert payload["points"] == 4
    assert len(payload["metric"]["labels"]) == 4

    target = tmp_path / "random.json"
    _, payload, _ = run(capsys, "random-metric", "--n", "4", "--seed", "3", "--output", str(target))
    assert "metric" not in payload
    assert json.loads(target.read_text())["labels"] == ["p0", "p1", "p2", "p3"]


def test_schreier_member(capsys):
    code, payload, _ = run(capsys, "schreier", "member", "--alpha", "w", "--set", "3,4,5")
    assert code == 0
    assert payload["member"] is True
    assert payload["alpha"] == "w"

    _, payload, _ = run(capsys, "schreier", "member", "--alpha", "1", "--set", "1,2")
    assert payload["member"] is False
    assert "witness" not in payload


def test_schreier_enum(capsys):
    _, payload, _ = run(capsys, "schreier", "enum", "--alpha", "1", "--n", "5")
    assert payload["count"] == 13
    assert payload["sets"][0] == ""


def test_schreier_spread(capsys):
    _, payload, _ = run(capsys, "schreier", "spread", "--alpha", "1", "--beta", "2", "--n", "3")
    assert payload["spreading"] == [1, 2, 3]
    assert payload["ok"]

    code, payload, _ = run(
        capsys, "schreier", "spread", "--alpha", "3", "--beta", "w", "--n", "8", "--map", "1,2,3,4,5,6,7,8"
    )
    assert code == 0
    assert payload["ok"] is False


def test_schreier_spread_rejects_equal_ordinals(capsys):
    code, _, err = run(capsys, "schreier", "spread", "--alpha", "2", "--beta", "2", "--n", "3")
    assert code == 1
    assert "ORDINAL_ORDER" in err


def test_bad_ordinal_is_a_usage_error(capsys):
    assert main(["schreier", "member", "--alpha", "w^", "--set", "1"]) == 2


def test_points(capsys):
    _, payload, _ = run(capsys, "points", "--alpha", "0", "--n", "2", "--m", "1", "--diameter")
    assert payload["count"] == 5
    assert payload["diameter"] == "2"
    assert "1:-1" in payload["points"]


def test_rank_tree_and_vine_files(capsys, tmp_path):
    tree = tmp_path / "tree.json"
    tree.write_text(json.dumps([[], [1]]))
    _, payload, _ = run(capsys, "rank", "--tree", str(tree))
    assert payload == {"kind": "tree", "size": 2, "rank": 2}

    vine = tmp_path / "vine.json"
    vine.write_text(
        json.dumps(
            {
                "bunches": [
                    {"ground": [], "alphabet": ["0", "1"], "values": {"": "x0"}},
                    {"ground": [3], "alphabet": ["0", "1"], "values": {"0": "x0", "1": "x1"}},
                ]
            }
        )
    )
    _, payload, _ = run(capsys, "rank", "--vine", str(vine))
    assert payload == {"kind": "vine", "size": 2, "rank": 2}


def test_rank_schreier(capsys):
    _, tree, _ = run(capsys, "rank", "--schreier", "1", "--n", "5")
    _, vine, _ = run(capsys, "rank", "--schreier", "1", "--n", "5", "--m", "1")
    assert tree["kind"] == "tree" and vine["kind"] == "vine"
    assert tree["rank"] == vine["rank"] == 4


def test_rank_rejects_a_non_tree(capsys, tmp_path):
    tree = tmp_path / "tree.json"
    tree.write_text(json.dumps([[], [1, 2]]))
    code, _, err = run(capsys, "rank", "--tree", str(tree))
    assert code == 1
    assert "NOT_A_TREE" in err


def test_glue_demo(capsys, tmp_path):
    plot = tmp_path / "glue.png"
    code, payload, _ = run(capsys, "glue-demo", "--samples", "100", "--seed", "1", "--plot", str(plot))
    assert code == 0
    assert payload["passed"]
    assert payload["ladder"][:4] == [0, 1, 3, 7]
    assert plot.exists()


def test_glue_demo_with_contracting_provider_fails(capsys):
    code, payload, _ = run(capsys, "glue-demo", "--samples", "50", "--contracting")
    assert code == 1
    assert payload["violations"] > 0


def test_pretty_output_is_a_table(capsys):
    assert main(["--pretty", "dist", "--a", "1,3", "--b", "2,4"]) == 0
    out = capsys.readouterr().out
    assert "adjacent" in out
    assert not out.lstrip().startswith("{")
