import json

import pytest

from conftest import CORPUS, corpus_source

from polyc.cli import main


def run_cli(capsys, *argv):
    code = main([str(a) for a in argv])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def corpus(name):
    return str(CORPUS / name)


class TestRun:
    def test_fastmul(self, capsys):
        code, out, _ = run_cli(capsys, "run", corpus("fastmul.pc"), "6", "7")
        assert code == 0 and out.strip() == "42"

    def test_type_error_exit_1(self, capsys):
        code, out, err = run_cli(capsys, "run", corpus("badmul.pc"), "6", "7")
        assert code == 1
        assert "iterable-assignment-in-loop" in err
        assert "non-iterable-loop-bound" in err

    def test_usage_error_exit_3(self, capsys):
        code, _, err = run_cli(capsys, "run", corpus("fastmul.pc"), "6")
        assert code == 3 and "expects 2 arguments" in err

    def test_bad_literal_exit_3(self, capsys):
        code, _, _ = run_cli(capsys, "run", corpus("fastmul.pc"), "6", "seven")
        assert code == 3

    def test_missing_file_exit_3(self, capsys):
        code, _, _ = run_cli(capsys, "run", "no_such_file.pc", "1")
        assert code == 3

    def test_negative_and_binary_literals(self, capsys):
        code, out, _ = run_cli(capsys, "run", corpus("fastmul.pc"),
                               "-6", "0b111")
        assert code == 0 and out.strip() == "-42"

    def test_knapsack_defaults_to_extended(self, capsys):
        code, out, _ = run_cli(capsys, "run", corpus("knapsack.pc"),
                               "[1,2,2,3,1]", "[1,2,3,4,5]", "0b11111",
                               "0b11111")
        assert code == 0 and out.strip() == "10"

    def test_json_output(self, capsys):
        code, out, _ = run_cli(capsys, "run", corpus("fastmul.pc"),
                               "6", "7", "--json", "--cost")
        assert code == 0
        doc = json.loads(out)
        assert doc["output"] == "42"
        assert doc["ic"] > 0 and doc["max_value_size"] >= 6

    def test_cost_flag_same_output(self, capsys):
        _, plain, _ = run_cli(capsys, "run", corpus("fastmul.pc"), "9", "31")
        _, costed, _ = run_cli(capsys, "run", corpus("fastmul.pc"), "9", "31",
                               "--cost")
        assert costed.splitlines()[0] == plain.strip()
        assert "ic:" in costed

    def test_runtime_error_exit_2(self, capsys, tmp_path):
        src = ("// mode: extended\n"
               "int main(iint n){array<int> a; a=array(size(n)); "
               "return a[99];}\n")
        f = tmp_path / "oob.pc"
        f.write_text(src)
        code, _, err = run_cli(capsys, "run", f, "1")
        assert code == 2 and "out of range" in err

    def test_fuel_env(self, capsys, monkeypatch):
        monkeypatch.setenv("POLYC_FUEL", "30")
        code, _, err = run_cli(capsys, "run", corpus("fastmul.pc"),
                               "100", "100")
        assert code == 2 and "fuel" in err.lower()

    def test_mode_flag_overrides(self, capsys, tmp_path):
        f = tmp_path / "ext.pc"
        f.write_text("int main(int x){x+=1; return x;}\n")
        code, _, _ = run_cli(capsys, "run", f, "1")
        assert code == 1  # core by default: += rejected
        code, out, _ = run_cli(capsys, "run", f, "1", "--mode", "extended")
        assert code == 0 and out.strip() == "2"


class TestCheck:
    def test_well_typed(self, capsys):
        code, out, _ = run_cli(capsys, "check", corpus("fastmul.pc"))
        assert code == 0 and out.strip() == "well-typed: int"

    def test_diagnostics_rendering(self, capsys):
        code, _, err = run_cli(capsys, "check", corpus("badmul.pc"))
        assert code == 1
        line = err.splitlines()[0]
        assert line.startswith(corpus("badmul.pc") + ":")
        parts = line.split(":")
        assert int(parts[1]) > 0 and int(parts[2]) > 0

    def test_json_diagnostics(self, capsys):
        code, out, _ = run_cli(capsys, "check", corpus("badmul.pc"), "--json")
        assert code == 1
        doc = json.loads(out)
        kinds = {d["kind"] for d in doc["diagnostics"]}
        assert "iterable-assignment-in-loop" in kinds


class TestCost:
    def test_loop_fixture_matches_accounting(self, capsys, tmp_path):
        # program wrapper around the counted loop: constant overhead on top
        # of the 4n+6 loop cost
        f = tmp_path / "loop.pc"
        f.write_text("int main(int z0){int x; x=1; iint z; z=z0;\n"
                     "for(i<size(z)) x=x+x;\nreturn x;}\n")
        n = 5
        code, out, _ = run_cli(capsys, "cost", f, str(2 ** n), "--json")
        assert code == 0
        doc = json.loads(out)
        # decl(1)+asgmt(2)+decl(1)+asgmt(2) + loop(4n+6) + return var(1)
        assert doc["ic"] == (4 * n + 6) + 7
        assert doc["output"] == str(2 ** (n + 1))


class TestCodegen:
    def test_clock_emits_checkable_program(self, capsys):
        code, out, _ = run_cli(capsys, "clock", "2")
        assert code == 0
        from polyc import check_program, parse_source, run_program
        from polyc.desugar import desugar

        prog = desugar(parse_source(out, "core"))
        assert check_program(prog, "core").ok
        assert run_program(prog, [2]).output == 128

    def test_clock_bad_degree(self, capsys):
        code, _, _ = run_cli(capsys, "clock", "0")
        assert code == 3

    def test_compile_tm(self, capsys):
        code, out, err = run_cli(capsys, "compile-tm", corpus("bitflip.tm"))
        assert code == 0
        assert "defaulting to 2" in err
        from polyc import check_program, parse_source, run_program
        from polyc.desugar import desugar
        from polyc.tm import decode_output, encode_input

        prog = desugar(parse_source(out, "core"))
        assert check_program(prog, "core").ok
        got = run_program(prog, [encode_input("1010")]).output
        assert decode_output(got) == "0101"


class TestTransformCmd:
    def test_t1(self, capsys):
        code, out, _ = run_cli(capsys, "transform", "t1",
                               corpus("double_loop.pc"))
        assert code == 0 and "if(-(x+y)>o)" in out.replace(" ", "")

    def test_t2(self, capsys):
        code, out, _ = run_cli(capsys, "transform", "t2",
                               corpus("double_loop.pc"))
        assert code == 0 and "o=o+o;" in out

    def test_normalize(self, capsys):
        code, out, err = run_cli(capsys, "transform", "normalize",
                                 corpus("fastmul.pc"))
        assert code == 0
        assert "budget variable" in err
        from polyc import check_program, parse_source, run_program
        from polyc.desugar import desugar

        prog = desugar(parse_source(out, "extended"))
        assert check_program(prog, "extended").ok
        assert run_program(prog, [6, 7, 1 << 10], mode="extended").output == 42


class TestAnalyze:
    def test_poly_with_witness(self, capsys):
        code, out, _ = run_cli(capsys, "analyze", corpus("fastmul.pc"))
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "poly"
        assert "iint z;" in out

    def test_unknown(self, capsys):
        code, out, _ = run_cli(capsys, "analyze", corpus("badmul.pc"))
        assert code == 0 and out.strip() == "unknown"


class TestEquiv:
    def test_reflexive(self, capsys):
        code, out, _ = run_cli(capsys, "equiv", corpus("fastmul.pc"),
                               corpus("fastmul.pc"), "2")
        assert code == 0 and out.strip() == "true"

    def test_witness_printed(self, capsys, tmp_path):
        f = tmp_path / "addp.pc"
        f.write_text("int main(int x,int y){return x+y;}\n")
        code, out, _ = run_cli(capsys, "equiv", corpus("fastmul.pc"), f, "3")
        assert code == 0
        assert out.splitlines()[0] == "false"
        assert out.splitlines()[1].startswith("witness: ")


class TestExitCodeTotality:
    def test_unknown_subcommand(self, capsys):
        assert main(["frobnicate"]) == 3
        capsys.readouterr()

    def test_help_is_success(self, capsys):
        assert main(["--help"]) == 0
        capsys.readouterr()

    def test_missing_arguments(self, capsys):
        assert main(["run"]) == 3
        capsys.readouterr()
