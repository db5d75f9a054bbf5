import json

import pytest

from polyext.functionals import CheckValue
from polyext.radial_field import load_field
from polyext.verify_cli import (DEFAULT_CONFIG, GROUPS, ConfigError, SuiteConfig,
                                VerificationReport, main, read_report, run_suite, write_report)


def _write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return p


# -- configuration ----------------------------------------------------------------


def test_default_config_round_trip():
    cfg = SuiteConfig.default()
    assert cfg.groups == GROUPS
    again = SuiteConfig.from_dict(cfg.to_dict())
    assert again.to_dict() == cfg.to_dict()
    assert set(cfg.to_dict()) == set(DEFAULT_CONFIG)


def test_config_rejects_s_above_half_n():
    with pytest.raises(ConfigError) as exc:
        SuiteConfig.from_dict({"orders": [[2, 1.2]]})
    assert exc.value.errors[0].startswith("config.orders[0]:")
    assert "s < n/2" in exc.value.errors[0]


def test_config_errors_carry_paths():
    raw = {"groups": ["energy", "plots"], "kernel": {"b_values": [0.0, 1.5]},
           "hardy": [[2, 2, 0.0, 0.0]], "bogus": 1, "resolution": {"rho_max": -1}}
    with pytest.raises(ConfigError) as exc:
        SuiteConfig.from_dict(raw)
    paths = {e.split(":")[0] for e in exc.value.errors}
    assert paths == {"config.groups[1]", "config.kernel.b_values[1]", "config.hardy[0]",
                     "config.bogus", "config.resolution.rho_max"}


def test_config_rejects_bad_family_and_non_object():
    with pytest.raises(ConfigError, match=r"config.families\[0\]"):
        SuiteConfig.from_dict({"families": ["lorentzian"]})
    with pytest.raises(ConfigError):
        SuiteConfig.from_dict([1, 2])


def test_config_load_errors(tmp_path):
    with pytest.raises(ConfigError, match="invalid JSON"):
        SuiteConfig.load(_write(tmp_path, "bad.json", "{oops"))
    with pytest.raises(ConfigError, match="cannot read"):
        SuiteConfig.load(tmp_path / "missing.json")


# -- running and reports ------------------------------------------------------------


def test_empty_groups():
    rep = run_suite(SuiteConfig.from_dict({"groups": []}))
    assert rep.checks == []
    assert rep.summary() == {"total": 0, "passed": 0, "failed": 0}
    assert rep.ok


def test_constants_group_passes():
    rep = run_suite(SuiteConfig.default().with_groups(["constants"]))
    assert rep.summary()["total"] > 10
    assert rep.ok, [c.name for c in rep.checks if not c.passed]
    s = rep.summary()
    assert s["passed"] + s["failed"] == s["total"] == len(rep.checks)


def test_exceptions_become_failed_checks(monkeypatch):
    import polyext.verify_cli as vc

    def boom(*a, **k):
        raise FloatingPointError("overflow in a Bessel edge case")
    monkeypatch.setattr(vc, "limits_gap", boom)
    rep = run_suite(SuiteConfig.default().with_groups(["limits", "recursion"]))
    bad = [c for c in rep.checks if not c.passed]
    assert bad and all(c.name.startswith("limits.") for c in bad)
    gaps = [c for c in bad if c.name.startswith("limits.gap")]
    assert len(gaps) == 3 and all("FloatingPointError" in c.note for c in gaps)
    assert any(c.name.startswith("recursion.") and c.passed for c in rep.checks)


def test_broken_group_is_reported(monkeypatch):
    import polyext.verify_cli as vc

    def broken(rec, cfg):
        raise RuntimeError("group failed")
    monkeypatch.setitem(vc._RUNNERS, "dtn", broken)
    rep = run_suite(SuiteConfig.default().with_groups(["dtn"]))
    assert [c.name for c in rep.checks] == ["dtn.error"]
    assert not rep.ok


def test_tol_scale_tightens():
    cfg = SuiteConfig.default().with_groups(["recursion"])
    assert run_suite(cfg).ok
    assert not run_suite(cfg, tol_scale=1e-30).ok


def _report():
    rep = VerificationReport({"groups": []})
    rep.checks = [CheckValue("a.one", {"n": 2}, 1.0, 1.0, 1e-12),
                  CheckValue("a.two_longer_name", {}, 0.05, None, 0.1, "max"),
                  CheckValue("a.three", {}, 3.0, 2.0, 0.1, "rel")]
    rep.timings = {"a": 0.01}
    return rep


def test_json_round_trip(tmp_path):
    rep = _report()
    p = tmp_path / "r.json"
    write_report(rep, p, "json")
    back = read_report(p)
    want = rep.to_dict()
    assert {k: v for k, v in back.items() if k != "run"} == \
        {k: v for k, v in want.items() if k != "run"}
    assert back["summary"] == {"total": 3, "passed": 2, "failed": 1}
    row = back["checks"][0]
    assert set(row) >= {"name", "params", "measured", "expected", "abs_err", "rel_err", "tol",
                        "pass"}
    assert back["checks"][1]["expected"] is None


def test_text_report(tmp_path):
    rep = _report()
    p = tmp_path / "r.txt"
    write_report(rep, p, "text")
    lines = p.read_text().splitlines()
    assert lines[0].split()[:2] == ["status", "name"]
    assert [ln.split()[0] for ln in lines[1:4]] == ["PASS", "PASS", "FAIL"]
    # columns line up: the measured column starts at the same offset in every row
    starts = {ln.index(ln.split()[2]) for ln in lines[1:4]}
    assert len(starts) == 1
    assert lines[-1] == "total=3 passed=2 failed=1"


def test_write_report_bad_format(tmp_path):
    with pytest.raises(ValueError):
        write_report(_report(), tmp_path / "x", "yaml")


def test_nan_measurement_serialises(tmp_path):
    rep = VerificationReport({})
    rep.checks = [CheckValue("x", {}, float("nan"), 1.0, 0.1)]
    write_report(rep, tmp_path / "r.json")
    back = read_report(tmp_path / "r.json")
    assert back["checks"][0]["measured"] is None
    assert back["checks"][0]["pass"] is False


# -- command line --------------------------------------------------------------------


def test_cli_suite_subset(tmp_path, capsys):
    cfg = _write(tmp_path, "c.json", {"groups": ["constants", "recursion"]})
    out = tmp_path / "r.json"
    assert main(["suite", "--config", str(cfg), "--out", str(out), "--format", "json"]) == 0
    rep = read_report(out)
    assert rep["summary"]["failed"] == 0
    assert rep["config"]["groups"] == ["constants", "recursion"]


def test_cli_global_flags_before_command(tmp_path):
    out = tmp_path / "r.txt"
    assert main(["--out", str(out), "--format", "text", "constants"]) == 0
    assert out.read_text().splitlines()[-1].endswith("failed=0")


def test_cli_determinism(tmp_path):
    cfg = _write(tmp_path, "c.json", {"groups": ["constants", "recursion", "limits"]})
    outs = []
    for i in range(2):
        out = tmp_path / f"r{i}.json"
        assert main(["suite", "--config", str(cfg), "--out", str(out), "--format", "json"]) == 0
        d = read_report(out)
        d.pop("run")
        outs.append(json.dumps(d, indent=2))
    assert outs[0] == outs[1]


def test_cli_failure_exit(capsys):
    assert main(["constants", "--tol-scale", "1e-30"]) == 1
    assert "FAIL" in capsys.readouterr().out


@pytest.mark.parametrize("argv", [
    ["--nope", "suite"],
    ["suite", "--nope"],
    [],
    ["frobnicate"],
    ["suite", "--format", "xml"],
    ["suite", "--tol-scale", "0"],
    ["hardy", "--n", "2", "--k", "2", "--a", "0", "--b", "0"],
    ["hardy", "--n", "2"],
    ["energy", "--n", "2", "--s", "1.2"],
    ["extend", "--family", "gaussian", "--n", "4"],
])
def test_cli_usage_errors(argv, capsys):
    assert main(argv) == 2


def test_cli_bad_config_exit(tmp_path, capsys):
    for body in ("{not json", {"groups": ["nope"]}, {"orders": [[2, 1.2]]}):
        cfg = _write(tmp_path, "bad.json", body)
        assert main(["suite", "--config", str(cfg)]) == 2
    err = capsys.readouterr().err
    assert "config.orders[0]" in err


def test_cli_empty_groups(tmp_path, capsys):
    cfg = _write(tmp_path, "c.json", {"groups": []})
    assert main(["suite", "--config", str(cfg)]) == 0
    assert "total=0 passed=0 failed=0" in capsys.readouterr().out


def test_cli_extend_writes_field(tmp_path, capsys):
    out = tmp_path / "f.csv"
    assert main(["extend", "--family", "gaussian", "--n", "4", "--s", "1.5",
                 "--out", str(out)]) == 0
    assert out.read_text().startswith("# polyext-field v1")
    fld = load_field(out)
    assert fld.n == 4 and fld.alpha == 1.5
    assert fld.values.shape == (fld.x.size, fld.y.size)


def test_cli_dump(tmp_path, capsys):
    cfg = _write(tmp_path, "c.json", {"groups": ["dtn"]})
    assert main(["dump", "--config", str(cfg)]) == 0
    d = json.loads(capsys.readouterr().out)
    assert d["groups"] == ["dtn"]
    assert d["orders"] == DEFAULT_CONFIG["orders"]


def test_cli_hardy_single(capsys):
    assert main(["hardy", "--n", "2", "--k", "1", "--a", "0", "--b", "0"]) == 0
    assert "hardy" in capsys.readouterr().out


def test_cli_version(capsys):
    assert main(["--version"]) == 0
