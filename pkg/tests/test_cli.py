"""Command-line interface: configuration, JSON output, exit codes and determinism."""

from __future__ import annotations

import json
import re

import pytest
from click.testing import CliRunner
from gmpy2 import mpq

from quotseries.cli import SCHEMA, TASKS, frac, main, parse_fraction


FRACTION = re.compile(r"-?\d+/\d+")


def _invoke(args, tmp_path=None, config=None, env=None):
    argv = list(args)
    if config is not None:
        path = tmp_path / "run.toml"
        path.write_text(config)
        argv += ["--config", str(path)]
    return CliRunner().invoke(main, argv, env=env)


def _fractions(node):
    """Every fraction string inside a JSON document."""
    if isinstance(node, str) and FRACTION.fullmatch(node):
        yield node
    elif isinstance(node, dict):
        for v in node.values():
            yield from _fractions(v)
    elif isinstance(node, list):
        for v in node:
            yield from _fractions(v)


def test_every_task_is_a_subcommand():
    assert set(main.commands) == set(TASKS)


def test_macmahon_series():
    res = _invoke(["series", "--order", "6"])
    assert res.exit_code == 0
    doc = json.loads(res.output)
    assert doc["schema"] == SCHEMA and doc["name"] == "macmahon"
    assert [parse_fraction(c) for _, c in doc["series"]["coeffs"]] == [1, 1, 3, 6, 13, 24]


def test_g_identity_for_given_Q(tmp_path):
    res = _invoke(["verify-identity", "--order", "8"], tmp_path, 'e = 2\nQ = [1, 1, 1]\n')
    assert res.exit_code == 0, res.output
    doc = json.loads(res.output)
    assert doc["all_pass"] and doc["verdicts"] == {"pass": 1}
    assert doc["items"][0]["key"] == "G/e=2/Q000"


def test_nonpositive_rank_is_a_config_error(tmp_path):
    res = _invoke(["verify-identity"], tmp_path, "e = 0\n")
    assert res.exit_code == 2
    err = json.loads(res.stderr)
    assert err["error"] == "ConfigError" and err["field"] == "e"


def test_malformed_toml_is_a_config_error(tmp_path):
    res = _invoke(["symmetry"], tmp_path, "e = [1,\n")
    assert res.exit_code == 2


def test_task_mismatch_is_a_config_error(tmp_path):
    res = _invoke(["nekrasov"], tmp_path, 'task = "symmetry"\n')
    assert res.exit_code == 2


def test_failing_check_gives_exit_one(tmp_path):
    res = _invoke(["wallcross", "--order", "3"], tmp_path,
                  'checks = ["points-stated"]\nkinds = ["surface"]\ne = [1]\nrandom = 1\n')
    assert res.exit_code == 1
    doc = json.loads(res.output)
    assert not doc["all_pass"] and doc["verdicts"] == {"fail": 1}
    assert "first_difference" in doc["items"][0]


def test_output_is_deterministic_and_written_to_file(tmp_path):
    config = 'checks = ["segre-verlinde", "bridge"]\ne = [1, 2]\nrandom = 2\n'
    first = _invoke(["symmetry", "--order", "4", "--seed", "3"], tmp_path, config)
    second = _invoke(["symmetry", "--order", "4", "--seed", "3"], tmp_path, config)
    assert first.exit_code == 0 and first.output == second.output
    out = tmp_path / "result.json"
    third = _invoke(["symmetry", "--order", "4", "--seed", "3", "--out", str(out)], tmp_path, config)
    assert third.exit_code == 0 and third.output == ""
    assert out.read_text() == first.output


def test_worker_pool_matches_serial_run(tmp_path):
    config = 'checks = ["segre-verlinde"]\ne = [1, 2]\nrandom = 2\n'
    serial = _invoke(["symmetry", "--order", "4"], tmp_path, config)
    pooled = _invoke(["symmetry", "--order", "4"], tmp_path, config, env={"QUOTSERIES_WORKERS": "2"})
    assert serial.output == pooled.output


def test_invalid_worker_count(tmp_path):
    res = _invoke(["series", "--order", "3"], env={"QUOTSERIES_WORKERS": "zero"})
    assert res.exit_code == 2


@pytest.mark.parametrize("args,config", [
    (["series", "--order", "5"], 'series = "verlinde"\nkind = "surface"\ne = 2\na = 1\nc1sq = 1\nc1E_dot = "1/2"\n'),
    (["nekrasov", "--order", "4"], "e = [1]\ngamma = [1]\n"),
    (["descendants", "--order", "6"], 'descendant = "cohomological"\nc1sq = 1\nc1E_dot = 1\nk = [1]\n'),
])
def test_fractions_round_trip(tmp_path, args, config):
    res = _invoke(args, tmp_path, config)
    assert res.exit_code in (0, 1), res.output
    found = list(_fractions(json.loads(res.output)))
    assert found
    for text in found:
        assert frac(parse_fraction(text)) == text


def test_fraction_format():
    assert frac(mpq(-6, 4)) == "-3/2"
    assert frac(5) == "5/1"
    assert parse_fraction("7") == 7
    with pytest.raises(ValueError):
        parse_fraction(True)
