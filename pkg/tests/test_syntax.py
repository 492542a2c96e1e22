import pytest

from conftest import compile_src, corpus_source, load

from polyc import desugar, parse_source, pretty_print, tokenize
from polyc.ast import (
    Assign, Block, Const, Decl, For, If, OpApp, Paren, Program, Var, IINT,
)
from polyc.errors import DesugarError, LexError, ParseError
from polyc.parser import detect_mode


def kinds(source):
    return [(t.kind, t.lexeme) for t in tokenize(source)[:-1]]


class TestTokenize:
    def test_declaration(self):
        assert kinds("iint z;") == [
            ("keyword", "iint"), ("identifier", "z"), ("punctuation", ";")]

    def test_binary_literal(self):
        assert kinds("0b11111") == [("binary-literal", "0b11111")]

    def test_illegal_character(self):
        with pytest.raises(LexError) as exc:
            tokenize("x@y")
        assert exc.value.pos.col == 2

    def test_comments_discarded(self):
        assert kinds("x // trailing\ny") == [
            ("identifier", "x"), ("identifier", "y")]

    def test_positions(self):
        toks = tokenize("x\n  y")
        assert (toks[0].pos.line, toks[0].pos.col) == (1, 1)
        assert (toks[1].pos.line, toks[1].pos.col) == (2, 3)

    def test_lexemes_reconstruct_source(self):
        src = corpus_source("fastmul.pc")
        lexemes = [t.lexeme for t in tokenize(src)[:-1]]
        squashed = "".join(src.split())
        # comments are discarded, everything else survives
        for lx in lexemes:
            assert lx in squashed

    def test_operators_maximal_munch(self):
        assert [t.lexeme for t in tokenize("a<=b==c&&d")[:-1]] == [
            "a", "<=", "b", "==", "c", "&&", "d"]


class TestParse:
    def test_fastmul_shape(self):
        prog, _ = load("fastmul.pc")
        assert len(prog.params) == 2
        assert len(prog.body) == 4  # int o; iint z; z=y; for(...)
        assert prog.ret_expr == Var("o")

    def test_minimal_program(self):
        prog = compile_src("int main(){return 0;}")
        assert prog.params == [] and prog.body == []

    def test_bare_variable_bound_rejected(self):
        with pytest.raises(ParseError):
            compile_src("int main(int x){for(i<x) {} return 0;}")

    def test_literal_bound_accepted(self):
        prog = compile_src("int main(){int o; for(k<3) o=o+1; return o;}")
        assert isinstance(prog.body[1], For)
        assert prog.body[1].bound == Const("3")

    def test_core_rejects_extended_features(self):
        for src in [
            "int main(){int f(int a){return a;} return 0;}",
            "int main(){break; return 0;}",
            "int main(int x){x+=1; return x;}",
            "int main(int x){if(x>0) x=1; return x;}",
            "int main(iint x){return x;}",
            'int main(){string s; return 0;}',
        ]:
            with pytest.raises(ParseError) as exc:
                compile_src(src, "core")
            assert exc.value.core_violation
            compile_src(src, "extended")  # accepted there

    def test_error_position_in_bounds(self):
        src = "int main(){return $;}"
        with pytest.raises(LexError) as exc:
            compile_src(src)
        lines = src.splitlines()
        assert 1 <= exc.value.pos.line <= len(lines)
        assert 1 <= exc.value.pos.col <= len(lines[exc.value.pos.line - 1]) + 1

    def test_trailing_garbage(self):
        with pytest.raises(ParseError):
            parse_source("int main(){return 0;} int")

    def test_core_accepted_matches_extended(self):
        for name in ["fastmul.pc", "double_loop.pc", "branchy.pc",
                     "sum_counters.pc"]:
            src = corpus_source(name)
            assert parse_source(src, "core") == parse_source(src, "extended")

    def test_mode_detection(self):
        assert detect_mode(corpus_source("knapsack.pc")) == "extended"
        assert detect_mode(corpus_source("fastmul.pc")) == "core"


class TestDesugar:
    def test_scalar_mult(self):
        prog = compile_src("int main(int y){int x; x=3*y; return x;}")
        assert prog.body[1].expr == OpApp("+", [OpApp("+", [Var("y"), Var("y")]),
                                                Var("y")])

    def test_scalar_mult_literal_on_right(self):
        prog = compile_src("int main(int y){int x; x=y*2; return x;}")
        assert prog.body[1].expr == OpApp("+", [Var("y"), Var("y")])

    def test_general_mult_prohibited(self):
        with pytest.raises(DesugarError):
            compile_src("int main(int z,int y){int x; x=z*y; return x;}")

    def test_augmented_assign(self):
        prog = compile_src("int main(int x){x+=1; return x;}", "extended")
        assert prog.body[0] == Assign(Var("x"), OpApp("+", [Var("x"), Const("1")]))

    def test_increment(self):
        prog = compile_src("int main(int x){x++; return x;}", "extended")
        assert prog.body[0] == Assign(Var("x"), OpApp("+", [Var("x"), Const("1")]))

    def test_if_without_else_gains_empty_block(self):
        prog = compile_src("int main(int x){if(x>0) x=1; return x;}", "extended")
        assert prog.body[0].els == Block([])

    def test_decl_initializer(self):
        prog = compile_src("int main(){int a=4; return a;}", "extended")
        assert prog.body[0] == Decl(None, "a") or isinstance(prog.body[0], Decl)
        assert prog.body[1] == Assign(Var("a"), Const("4"))

    def test_idempotent(self):
        for name in ["fastmul.pc", "knapsack.pc", "path.pc", "sort.pc"]:
            prog, _ = load(name)
            assert desugar(prog) == prog

    def test_augassign_wraps_compound_rhs(self):
        prog = compile_src("int main(int x,int y){x-=y+1; return x;}", "extended")
        assert prog.body[0].expr == OpApp("-", [Var("x"),
                                                Paren(OpApp("+", [Var("y"),
                                                                  Const("1")]))])


class TestPrettyPrint:
    def test_round_trip_corpus(self):
        for name in ["fastmul.pc", "badmul.pc", "double_loop.pc", "branchy.pc",
                     "sum_counters.pc", "identity.pc", "single_step.pc"]:
            prog, mode = load(name)
            assert parse_source(pretty_print(prog), mode) == prog

    def test_round_trip_extended_corpus(self):
        for name in ["knapsack.pc", "path.pc", "sort.pc"]:
            prog, _ = load(name)
            assert parse_source(pretty_print(prog), "extended") == prog

    def test_infix_surface(self):
        from polyc.printer import expr_str

        assert expr_str(OpApp("+", [Var("x"), Var("x")])) == "x+x"

    def test_empty_loop_body(self):
        from polyc.printer import stmt_str

        s = For("i", OpApp("size", [Var("z")]), Block([]))
        assert stmt_str(s) == "for(i<size(z)) { }"

    def test_round_trip_generated(self):
        import fuzzgen

        for seed in range(150):
            prog = fuzzgen.gen_program(seed)
            assert parse_source(pretty_print(prog), "core") == prog

    def test_paren_nodes_preserved(self):
        prog = compile_src("int main(int x){return (x+1)/2;}")
        assert prog.ret_expr == OpApp("/", [Paren(OpApp("+", [Var("x"),
                                                              Const("1")])),
                                            Const("2")])
        assert parse_source(pretty_print(prog), "core") == prog
