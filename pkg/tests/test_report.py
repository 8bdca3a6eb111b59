import json

from fracloop.report import VerificationReport, inputs_digest


def _sample():
    rep = VerificationReport(suite="demo", config={"seed": 7, "x": 0.5})
    rep.check("b-second", "anchor b", 1e-12, 1e-9, digest="abcd")
    rep.check("a-first", "anchor a", 2.0, 1e-9, digest="ef01")
    return rep


def test_body_schema_and_ordering():
    body = _sample().body()
    assert set(body) >= {"suite", "config", "checks", "summary"}
    ids = [c["id"] for c in body["checks"]]
    assert ids == sorted(ids)
    for c in body["checks"]:
        assert set(c) >= {"id", "anchor", "residual", "tol", "pass"}
    assert body["summary"]["failed"] == ["a-first"]


def test_wall_time_is_excluded_from_the_body():
    rep = _sample()
    rep.checks[0].wall_time = 123.0
    assert "wall_time" not in json.dumps(rep.body())


def test_serialization_is_deterministic():
    assert _sample().to_json() == _sample().to_json()
    assert _sample().to_csv() == _sample().to_csv()


def test_inputs_digest_is_stable_and_input_sensitive():
    assert inputs_digest(7, "x") == inputs_digest(7, "x")
    assert inputs_digest(7, "x") != inputs_digest(8, "x")
    assert len(inputs_digest(7)) == 16


def test_exit_state():
    rep = _sample()
    assert not rep.all_pass
    assert rep.summary()["passed"] == 1
