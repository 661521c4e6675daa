"""
Tests for run configuration, reports and the command line
"""

import sys
import os
import io
import json
import math
import contextlib
import logging
import tempfile
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

import numpy as np
import pandas as pd

from automorphic.complexfn import ContourError
from automorphic.config import SUITES, ConfigError, RunConfig, config
from automorphic.reporting import CheckRecord, Report, to_jsonable, write_report, write_table
import cli


def test_run_config():
    """Defaults, tolerance overrides and rejected settings"""
    print("🧪 Testing run configuration...")
    run = RunConfig()
    assert run.suites == list(SUITES) and run.jobs == 1 and run.T_list == [2.0, 4.0]
    assert RunConfig(suites=[]).suites == list(SUITES)
    tight = RunConfig(tol=1e-9)
    assert tight.tolerances["identity"] == 1e-9 and tight.tolerances["products"] == 1e-9
    assert tight.tolerances["pole_guard"] == config.get_tolerance_config()["pole_guard"]
    for bad in (dict(tol=-1.0), dict(suites=["nope"]), dict(jobs=0), dict(T_list=[0.5])):
        try:
            RunConfig(**bad)
            raise AssertionError(f"{bad} should be rejected")
        except ConfigError:
            pass
    validation = config.validate_config()
    assert validation["valid"], validation["errors"]
    print("   ✅ Run configuration test passed")


def test_check_records():
    """Absolute and relative comparisons, flags and JSON conversion"""
    print("🧪 Testing check records...")
    assert CheckRecord.compare("a", "x = 1", 1.0 + 1e-9, 1.0, 1e-8).passed
    assert not CheckRecord.compare("b", "x = 1", 1.1, 1.0, 1e-8).passed
    assert CheckRecord.compare("c", "x = 100", 100.5, 100.0, 1e-2, relative=True).passed
    flagged = CheckRecord.flag("d", "row verdict", {"value": 3, "ok": True}, ref="demo")
    assert flagged.passed and flagged.computed == {"value": 3}
    assert to_jsonable({"z": 1 + 2j, "arr": np.arange(2), "bad": float("nan"), "b": np.bool_(True)}) == \
        {"z": [1.0, 2.0], "arr": [0, 1], "bad": "nan", "b": True}
    report = Report("demo")
    report.add(flagged)
    assert report.passed
    report.error = "RuntimeError: boom"
    assert not report.passed
    try:
        Report("demo").add(CheckRecord.compare("e", "x = 1", 1.0, 1.0, 1e-12))
        raise AssertionError("a record without ref must be rejected")
    except ValueError:
        pass
    noted = Report("demo", notes={"printed": {"value": -15.37}})
    noted.add(CheckRecord.compare("f", "x = 1", 1.0, 1.0, 1e-12, ref="demo"))
    assert noted.passed and noted.to_dict()["notes"] == {"printed": {"value": -15.37}}
    print("   ✅ Check records test passed")


def test_report_files():
    """The JSON report and CSV tables are written where requested"""
    print("🧪 Testing report files...")
    with tempfile.TemporaryDirectory() as tmp:
        report = Report("demo", [CheckRecord.compare("a", "x = 1", 1.0, 1.0, 1e-12, ref="demo")])
        path = os.path.join(tmp, "nested", "report.json")
        payload = write_report([report], path, seed=3)
        with open(path) as f:
            stored = json.load(f)
        assert stored == payload and stored["passed"] and stored["seed"] == 3
        table_path = os.path.join(tmp, "table.csv")
        write_table(pd.DataFrame({"y": [1.0, 2.0]}), table_path)
        assert pd.read_csv(table_path)["y"].tolist() == [1.0, 2.0]
    print("   ✅ Report files test passed")


def test_command_line():
    """Exit codes for a passing command, a bad tolerance and a bad config file"""
    print("🧪 Testing command line...")
    with tempfile.TemporaryDirectory() as tmp:
        assert cli.main(["coset", "--N", "5", "--matrix", "2,1;7,4"]) == cli.EXIT_PASS
        out = os.path.join(tmp, "report.json")
        assert cli.main(["run", "--suite", "constants", "--out", out]) == cli.EXIT_PASS
        with open(out) as f:
            stored = json.load(f)
        assert [suite["suite"] for suite in stored["suites"]] == ["constants"]
        assert cli.main(["run", "--suite", "constants", "--tol", "-1", "--out", out]) == cli.EXIT_USAGE
        bad = os.path.join(tmp, "bad.json")
        with open(bad, "w") as f:
            f.write("{not json")
        assert cli.main(["constants", "--config", bad, "--out", out]) == cli.EXIT_USAGE
        assert cli.main(["run", "--suite", "nope", "--out", out]) == cli.EXIT_USAGE
    print("   ✅ Command line test passed")


def captured(argv):
    """Exit code and parsed JSON printed by one command"""
    buffer = io.StringIO()
    with contextlib.redirect_stdout(buffer):
        status = cli.main(argv)
    text = buffer.getvalue()
    return status, json.loads(text[text.index("{"):])


def test_command_output():
    """JSON printed by constants, eisenstein eval, reg-int and verify --phi"""
    print("🧪 Testing command output...")
    with tempfile.TemporaryDirectory() as tmp:
        out = os.path.join(tmp, "report.json")
        status, scalars = captured(["constants", "--out", out])
        assert status == cli.EXIT_PASS
        for key in ("lambda_residue", "zeta_star", "volume_closed", "functional_B", "m1", "m3",
                    "reg_hecke_defect_p2", "invariance_defect_q2"):
            assert key in scalars, key
        assert abs(scalars["volume_closed"] - math.pi / 3) < 1e-11
        assert abs(scalars["reg_hecke_defect_p2"] + scalars["invariance_defect_q2"]) < 1e-9
        assert all(value == float(f"{value:.12g}") for value in scalars.values() if isinstance(value, float))
        with open(out) as f:
            stored = json.load(f)
        for suite in stored["suites"]:
            assert all(record["ref"] for record in suite["records"])

    status, value = captured(["eisenstein", "eval", "--s", "0.3", "--z", "0.2+1.5j"])
    assert status == cli.EXIT_PASS
    assert value["variant"] == "plain" and 0 < value["error_bound"] < 1e-10
    assert cli.main(["eisenstein", "eval", "--s", "0.3"]) == cli.EXIT_USAGE

    status, result = captured(["reg-int", "--phi", "constant", "--T", "2", "--T", "3"])
    assert status == cli.EXIT_PASS
    assert abs(result["value"][0] - math.pi / 3) < 1e-4
    assert result["residual_checks"]["T_spread"] < 1e-6

    status, result = captured(["verify", "fundamental-identity", "--phi", "constant", "--s", "0.1+0.5j",
                               "--s", "0.4+0.3j", "--T", "2", "--T", "4"])
    assert status == cli.EXIT_PASS
    assert result["residual_checks"]["max_abs_diff"] < 1e-5
    print("   ✅ Command output test passed")


def test_failure_exit_codes():
    """Unverified normal forms and numerical breakdowns exit with 1"""
    print("🧪 Testing failure exit codes...")
    original_verify, original_payload = cli.verify, cli._reg_int_payload

    def unstable(*args, **kwargs):
        raise ContourError("Laurent coefficients leak past the requested orders")

    try:
        cli.verify = lambda A, rep: False
        assert cli.main(["coset", "--N", "5", "--matrix", "2,1;7,4"]) == cli.EXIT_FAIL
        cli._reg_int_payload = unstable
        assert cli.main(["reg-int", "--phi", "constant"]) == cli.EXIT_FAIL
    finally:
        cli.verify, cli._reg_int_payload = original_verify, original_payload
    assert cli.main(["reg-int", "--phi", "no_such_function"]) == cli.EXIT_USAGE
    print("   ✅ Failure exit codes test passed")


def test_crash_isolation():
    """A suite that raises is reported as failed without stopping the others"""
    print("🧪 Testing crash isolation...")
    runner = cli.VerificationRunner(RunConfig(suites=["coset", "padic"], jobs=2))

    def boom(report):
        raise RuntimeError("boom")

    runner.suites["padic"] = boom
    runner.suites["coset"] = lambda report: report.add(
        CheckRecord.compare("ok", "1 = 1", 1, 1, 0.5, ref="demo"))
    reports = runner.run()
    assert [r.suite for r in reports] == ["coset", "padic"]
    assert reports[0].passed and not reports[1].passed
    assert reports[1].error == "RuntimeError: boom"
    print("   ✅ Crash isolation test passed")


def run_all_tests():
    """Run all tests and provide summary"""
    print("🚀 Starting command line tests\n")

    tests = [
        ("Run configuration", test_run_config),
        ("Check records", test_check_records),
        ("Report files", test_report_files),
        ("Command line", test_command_line),
        ("Command output", test_command_output),
        ("Failure exit codes", test_failure_exit_codes),
        ("Crash isolation", test_crash_isolation),
    ]

    results = []
    for test_name, test_func in tests:
        try:
            test_func()
            results.append((test_name, True))
        except Exception as e:
            print(f"   ❌ {test_name} test failed: {e!r}")
            results.append((test_name, False))
        print()

    print("📋 Test Summary:")
    passed = sum(1 for _, ok in results if ok)
    for test_name, ok in results:
        print(f"   {test_name}: {'✅ PASSED' if ok else '❌ FAILED'}")
    print(f"\n🎯 Overall: {passed}/{len(results)} tests passed")
    return passed == len(results)


if __name__ == "__main__":
    logging.basicConfig(level=logging.WARNING)
    sys.exit(0 if run_all_tests() else 1)
