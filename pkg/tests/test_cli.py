"""CLI surface: argument handling, exit codes, output formats, caching."""

import io
import json
import os
from contextlib import redirect_stdout

import pytest

from dualbound.cli import (
    EXIT_COMPUTATION,
    EXIT_OK,
    EXIT_USAGE,
    ResultCache,
    RunConfig,
    main,
)


def run_cli(argv):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = main(argv)
    return code, buf.getvalue()


def test_no_arguments_is_usage_error():
    code, _ = run_cli([])
    assert code == EXIT_USAGE


def test_unknown_subcommand_is_usage_error():
    code, _ = run_cli(["sphere-bound", "8"])
    assert code == EXIT_USAGE


def test_bad_precision_is_usage_error():
    code, _ = run_cli(["--precision", "10", "code-bound", "8"])
    assert code == EXIT_USAGE


def test_code_bound_text_output():
    code, out = run_cli(["code-bound", "8", "24"])
    assert code == EXIT_OK
    lines = out.strip().splitlines()
    assert "mu=4" in lines[0] and "n=8" in lines[0]
    assert "mu=8" in lines[1] and "n=24" in lines[1]


def test_code_bound_json_output():
    code, out = run_cli(["--format", "json", "code-bound", "8"])
    assert code == EXIT_OK
    rows = json.loads(out)
    assert rows[0]["n"] == 8 and rows[0]["mu"] == 4


def test_code_bound_csv_output():
    code, out = run_cli(["--format", "csv", "code-bound", "8"])
    assert code == EXIT_OK
    lines = out.strip().splitlines()
    assert lines[0].split(",")[:2] == ["n", "mu"]
    assert lines[1].split(",")[:2] == ["8", "4"]


def test_code_bound_partial_failure_returns_computation_error():
    code, out = run_cli(["--format", "json", "code-bound", "8", "0"])
    assert code == EXIT_COMPUTATION
    rows = json.loads(out)
    # the healthy job still completed
    assert rows[0]["mu"] == 4
    assert rows[1]["mu"] == "error"


def test_magic_unsupported_charge_is_usage_error():
    code, _ = run_cli(["magic", "verify", "--c", "12"])
    assert code == EXIT_USAGE


def test_magic_eval_emits_csv():
    code, out = run_cli(["--precision", "128", "magic", "eval", "--c", "8",
                         "--h", "1.6:2.4:0.4"])
    assert code == EXIT_OK
    lines = out.strip().splitlines()
    assert lines[0] == "h,f"
    assert len(lines) == 4  # header + h = 1.6, 2.0, 2.4
    # f(2.0) sits on the zero ladder: tiny compared to f(1.6)
    vals = {ln.split(",")[0]: abs(float(ln.split(",")[1]))
            for ln in lines[1:]}
    assert vals["2.0"] < 1e-8 * max(1.0, vals["1.6"])


def test_run_config_validation():
    with pytest.raises(ValueError):
        RunConfig(precision=16).validate()
    with pytest.raises(ValueError):
        RunConfig(N=0).validate()
    with pytest.raises(ValueError):
        RunConfig(tol=2.0).validate()
    with pytest.raises(ValueError):
        RunConfig(fmt="yaml").validate()
    RunConfig().validate()


def test_result_cache_roundtrip(tmp_path):
    cache = ResultCache(str(tmp_path))
    key = ResultCache.key("voa", "8/7", 12, 256)
    assert "/" not in key
    assert cache.get(key) is None
    cache.put(key, {"bound": "1.0"})
    assert cache.get(key) == {"bound": "1.0"}
    # no stray temp files survive
    leftovers = [f for f in os.listdir(tmp_path) if f.endswith(".tmp")]
    assert leftovers == []


def test_bound_cache_replays_byte_identical(tmp_path):
    # small N keeps the bisection cheap; second run must hit the cache
    # and reproduce the exact same bytes
    args = ["--N", "2", "--cache", str(tmp_path), "--format", "json",
            "voa-bound", "8"]
    code1, out1 = run_cli(args)
    assert code1 == EXIT_OK
    files = sorted(os.listdir(tmp_path))
    assert len(files) == 1
    with open(tmp_path / files[0], "rb") as fh:
        cached1 = fh.read()
    code2, out2 = run_cli(args)
    assert code2 == EXIT_OK
    assert out2 == out1
    with open(tmp_path / files[0], "rb") as fh:
        assert fh.read() == cached1


def test_cache_env_var(tmp_path, monkeypatch):
    monkeypatch.setenv("DUALBOUND_CACHE", str(tmp_path))
    code, _ = run_cli(["--N", "2", "voa-bound", "8"])
    assert code == EXIT_OK
    assert len(os.listdir(tmp_path)) == 1
