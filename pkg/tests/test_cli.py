import json

import pytest

from sosw.cli.main import EXIT_INCONCLUSIVE, EXIT_INPUT, EXIT_OK, EXIT_VIOLATION, bounds_from, build_arg_parser, main
from sosw.dsl import parse_spec
from sosw.harness import load_bundled_spec

# 0 = tau.a, 1 = a
TAU_A = 'des (0,3,4)\n(0,"tau",2)\n(2,"a",3)\n(1,"a",3)\n'


@pytest.fixture
def aut_file(tmp_path):
    path = tmp_path / "tau_a.aut"
    path.write_text(TAU_A, encoding="utf-8")
    return str(path)


def run_json(capsys, argv):
    code = main(["--report", "json", *argv])
    out = capsys.readouterr().out
    return code, json.loads(out)


# ============================================================
# Error registry flags
# ============================================================

def test_list_errors(capsys):
    assert main(["--list-errors"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("E002:")
    assert any(line.startswith("E019:") for line in lines)


def test_explain_error(capsys):
    assert main(["--explain-error", "e006"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "[DEV]" not in out


def test_explain_unknown_error(capsys):
    assert main(["--explain-error", "E999"]) == EXIT_INPUT
    assert "E999" in capsys.readouterr().out


def test_no_command_prints_help(capsys):
    assert main([]) == EXIT_INPUT
    assert "usage" in capsys.readouterr().out.lower()


# ============================================================
# Input errors
# ============================================================

def test_missing_spec_file(capsys):
    assert main(["parse", "no/such/file.tss"]) == EXIT_INPUT
    assert "E017" in capsys.readouterr().err


def test_bad_depth(capsys):
    assert main(["--depth", "two", "parse", "bpa"]) == EXIT_INPUT
    assert "E018" in capsys.readouterr().err


def test_parse_error_in_file(tmp_path, capsys):
    path = tmp_path / "bad.tss"
    path.write_text("tss bad\nactions: a\nsymbols: f/1\nrule r: |- f( -a-> f(x)\n", encoding="utf-8")
    assert main(["parse", str(path)]) == EXIT_INPUT
    assert "E002" in capsys.readouterr().err


# ============================================================
# Subcommands
# ============================================================

def test_parse_print_round_trips(capsys):
    assert main(["parse", "bpa", "--print"]) == EXIT_OK
    assert parse_spec(capsys.readouterr().out) == load_bundled_spec("bpa")


def test_parse_json(capsys):
    code, payload = run_json(capsys, ["parse", "negative_counter"])
    assert code == EXIT_OK
    assert payload["name"] == "negative_counter"
    assert "f/1" in payload["symbols"]


def test_check_pass_and_fail(capsys):
    code, payload = run_json(capsys, ["check", "bpa", "--format", "rs"])
    assert code == EXIT_OK
    assert payload[0]["format"] == "ready-simulation"
    assert payload[0]["result"] == "pass"

    code, payload = run_json(capsys, ["check", "negative_counter", "--format", "rd"])
    assert code == EXIT_VIOLATION
    assert payload[0]["witnesses"]


def test_check_unknown_format(capsys):
    assert main(["check", "bpa", "--format", "trace"]) == EXIT_INPUT
    assert "E014" in capsys.readouterr().err


def test_ruloids_text(capsys):
    assert main(["ruloids", "bpa", "--term", "x1 + x2", "--label", "a"]) == EXIT_OK
    assert "2 ruloid(s)" in capsys.readouterr().out


def test_lts_writes_aut(tmp_path, capsys):
    out = tmp_path / "ab.aut"
    assert main(["lts", "bpa", "--term", "a + b", "--out", str(out)]) == EXIT_OK
    assert out.read_text(encoding="utf-8").startswith("des (0,")


def test_lts_partial_is_inconclusive(tmp_path, capsys):
    path = tmp_path / "grow.tss"
    path.write_text("tss grow\nactions: a\nsymbols: f/1 z/0\nrule grow: |- x -a-> f(x)\n", encoding="utf-8")
    assert main(["--depth", "2", "lts", str(path), "--term", "z"]) == EXIT_INCONCLUSIVE


def test_equiv_pairs(aut_file, capsys):
    code, payload = run_json(capsys, ["equiv", aut_file, "--kind", "delay", "--pairs", "0,1"])
    assert code == EXIT_OK
    assert payload["related"] is True

    code, payload = run_json(capsys, ["equiv", aut_file, "--kind", "rooted-delay", "--pairs", "0,1", "--explain"])
    assert code == EXIT_VIOLATION
    assert payload["related"] is False
    assert payload["witness"] is not None


def test_equiv_partition(aut_file, capsys):
    code, payload = run_json(capsys, ["equiv", aut_file, "--kind", "weak"])
    assert code == EXIT_OK
    assert any({"0", "1"} <= set(block) for block in payload["blocks"])


def test_equiv_unknown_state(aut_file, capsys):
    assert main(["equiv", aut_file, "--pairs", "0,9"]) == EXIT_INPUT
    assert "E015" in capsys.readouterr().err


def test_sat_with_class(aut_file, capsys):
    code, payload = run_json(capsys, ["sat", aut_file, "--state", "0", "--formula", "<eps><a>T", "--class", "O_rd"])
    assert code == EXIT_OK
    assert payload["holds"] is True
    assert payload["classes"] == {"O_rd": True}

    code, payload = run_json(capsys, ["sat", aut_file, "--state", "0", "--formula", "<a>T"])
    assert code == EXIT_VIOLATION
    assert payload["holds"] is False


def test_decompose_json(capsys):
    code, payload = run_json(capsys, ["decompose", "bpa", "--term", "x1 + x2", "--formula", "<a>T"])
    assert code == EXIT_OK
    assert payload["mappings"] == [{"x1": "<a>T"}, {"x2": "<a>T"}]


def test_decompose_dr_verifies_on_base(capsys):
    argv = ["decompose", "bpa", "--term", "x1 . x2", "--formula", "<eps><a>T", "--dr", "--verify"]
    code, payload = run_json(capsys, argv)
    assert code == EXIT_OK
    assert payload["verification"]["mismatches"] == []


def test_congruence_finds_counterexample(capsys):
    code, payload = run_json(capsys, ["congruence", "negative_counter", "--kind", "rooted-delay"])
    assert code == EXIT_VIOLATION
    pairs = [{v["left"], v["right"]} for v in payload["violations"]]
    assert {"f(p0)", "f(p1)"} in pairs


def test_suite_only(capsys):
    code, payload = run_json(capsys, ["suite", "--only", "pollable"])
    assert code == EXIT_OK
    assert payload["ok"] is True


# ============================================================
# Flag placement and aliases
# ============================================================

def test_global_flags_after_the_subcommand(capsys):
    code = main(["check", "bpa", "--format", "syntactic-rooted-delay", "--report", "json"])
    payload = json.loads(capsys.readouterr().out)
    assert code == EXIT_OK
    assert payload[0]["format"] == "syntactic-rooted-delay"
    assert payload[0]["result"] == "pass"


def test_global_flags_before_the_subcommand_still_work(capsys):
    code, payload = run_json(capsys, ["check", "bpa", "--format", "syntactic-rooted-delay"])
    assert code == EXIT_OK
    assert payload[0]["result"] == "pass"


def test_bad_depth_after_the_subcommand(capsys):
    assert main(["parse", "bpa", "--depth", "two"]) == EXIT_INPUT
    assert "E018" in capsys.readouterr().err


def test_markings_is_an_alias_of_candidate(capsys):
    argv = ["check", "bpa", "--format", "syntactic-rooted-delay", "--report", "json"]
    assert main([*argv, "--markings", "main"]) == EXIT_OK
    by_markings = json.loads(capsys.readouterr().out)
    assert main([*argv, "--candidate", "main"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out) == by_markings


def test_unknown_markings_name(capsys):
    assert main(["check", "bpa", "--markings", "nosuch"]) == EXIT_INPUT


def test_ruloids_source_alias_with_depth_after_the_subcommand(capsys):
    argv = ["ruloids", "linearity", "--source", "g(f(x))", "--label", "d", "--depth", "6"]
    assert main(argv) == EXIT_OK
    assert "2 ruloid(s)" in capsys.readouterr().out


def test_ruloids_proofs(capsys):
    argv = ["ruloids", "linearity", "--source", "g(f(x))", "--label", "d", "--proofs", "--report", "json"]
    assert main(argv) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    proofs = [r["proof"] for r in payload[0]["ruloids"]]
    assert len(proofs) == 2
    assert all("[by g_d]" in proof[0] for proof in proofs)
    assert all(any("[hypothesis]" in line for line in proof) for proof in proofs)

    assert main(["ruloids", "linearity", "--source", "g(f(x))", "--label", "d", "--proofs"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "[by f_b]" in out and "[by f_c]" in out


def test_ruloids_without_proofs_has_no_proof_field(capsys):
    code, payload = run_json(capsys, ["ruloids", "bpa", "--term", "x1 + x2", "--label", "a"])
    assert code == EXIT_OK
    assert all("proof" not in r for r in payload[0]["ruloids"])


def test_decompose_gamma_choices(capsys):
    argv = ["decompose", "bpa", "--term", "x1 . x2", "--formula", "<eps><a>T", "--report", "json"]
    assert main(argv) == EXIT_OK
    default = json.loads(capsys.readouterr().out)

    assert main([*argv, "--gamma", "aleph-lambda"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out) == default

    # alt1/alt2 are not patience rules, so + cannot be liquid
    assert main([*argv, "--gamma", "universal"]) == EXIT_INCONCLUSIVE
    assert json.loads(capsys.readouterr().out)["tags"] == ["not-patient"]

    assert main([*argv, "--gamma", "empty"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["tags"] == []


def test_depth_sets_proof_depth():
    args = build_arg_parser().parse_args(["ruloids", "bpa", "--source", "x1", "--depth", "3"])
    bounds = bounds_from(args)
    assert bounds.proof_depth == bounds.universe_depth == bounds.context_depth == 3
