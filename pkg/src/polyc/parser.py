"""Recursive descent parser producing the shared AST.

Core mode accepts the minimal language only; extended mode adds functions,
arrays, strings, break/continue and assignment sugar.  Sugar forms are kept
in the AST and lowered by desugar().
"""

from .ast import (
    ArrayCtor, ArrayT, Assign, AugAssign, Block, Break, Call, CallStmt, Const,
    Continue, Decl, DeclInit, For, FunDef, If, Incr, Index, OpApp, Paren,
    Program, Var, BOOL, IINT, INT, ISTRING, STRING,
)
from .errors import ParseError
from .lexer import tokenize

CORE_TYPES = {"iint": IINT, "int": INT, "bool": BOOL}
EXT_TYPES = {"string": STRING, "istring": ISTRING}

# binary operators by precedence level, loosest first
BIN_LEVELS = [
    ["||"],
    ["&&"],
    ["==", "!="],
    ["<", "<=", ">", ">="],
    ["+", "-"],
    ["*", "/", "%"],
]


def detect_mode(source):
    for line in source.splitlines():
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("//"):
            tag = stripped[2:].strip()
            if tag == "mode: extended":
                return "extended"
            if tag == "mode: core":
                return "core"
            continue
        break
    return "core"


def parse_source(source, mode=None):
    if mode is None:
        mode = detect_mode(source)
    return parse_program(tokenize(source), mode)


def parse_program(tokens, mode="core"):
    return Parser(tokens, mode).program()


class Parser:
    def __init__(self, tokens, mode):
        if mode not in ("core", "extended"):
            raise ValueError(f"unknown mode {mode!r}")
        self.toks = tokens
        self.i = 0
        self.mode = mode

    # -- token helpers ------------------------------------------------------

    def peek(self, ahead=0):
        j = min(self.i + ahead, len(self.toks) - 1)
        return self.toks[j]

    def next(self):
        t = self.toks[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def at(self, lexeme):
        t = self.peek()
        return t.lexeme == lexeme and t.kind in ("keyword", "operator-symbol", "punctuation")

    def accept(self, lexeme):
        if self.at(lexeme):
            return self.next()
        return None

    def expect(self, lexeme):
        t = self.peek()
        if not self.at(lexeme):
            self.fail(f"expected {lexeme!r}, found {t.lexeme!r}")
        return self.next()

    def expect_ident(self):
        t = self.peek()
        if t.kind != "identifier":
            self.fail(f"expected identifier, found {t.lexeme!r}")
        return self.next()

    def fail(self, msg, pos=None, core=False):
        raise ParseError(msg, pos or self.peek().pos, core_violation=core)

    def need_extended(self, feature):
        if self.mode != "extended":
            self.fail(f"{feature} requires extended mode", core=True)

    # -- grammar ------------------------------------------------------------

    def program(self):
        start = self.peek().pos
        self.expect("int")
        main = self.expect_ident()
        if main.lexeme != "main":
            self.fail("program entry point must be named 'main'", main.pos)
        self.expect("(")
        params = self.params(allow_any_type=(self.mode == "extended"))
        self.expect(")")
        self.expect("{")
        body = self.stmts_until_return()
        self.expect("return")
        ret = self.expr()
        self.expect(";")
        self.expect("}")
        if self.peek().kind != "eof":
            self.fail(f"trailing input after program: {self.peek().lexeme!r}")
        return Program(params, body, ret, pos=start)

    def params(self, allow_any_type):
        params = []
        if self.at(")"):
            return params
        while True:
            t = self.type_annot()
            if not allow_any_type and t is not INT:
                self.fail("main parameters must be int in core mode", core=True)
            name = self.expect_ident()
            params.append((t, name.lexeme))
            if not self.accept(","):
                return params

    def at_type(self):
        t = self.peek()
        if t.kind != "keyword":
            return False
        if t.lexeme in CORE_TYPES:
            return True
        return t.lexeme in EXT_TYPES or t.lexeme in ("array", "void")

    def type_annot(self):
        t = self.peek()
        if t.lexeme in CORE_TYPES:
            self.next()
            return CORE_TYPES[t.lexeme]
        if t.lexeme in EXT_TYPES:
            self.need_extended(f"type {t.lexeme}")
            self.next()
            return EXT_TYPES[t.lexeme]
        if t.lexeme == "array":
            self.need_extended("array types")
            self.next()
            self.expect("<")
            elem = self.type_annot()
            self.expect(">")
            return ArrayT(elem)
        self.fail(f"expected a type, found {t.lexeme!r}")

    def stmts_until_return(self):
        out = []
        while not self.at("return"):
            if self.peek().kind == "eof" or self.at("}"):
                self.fail("expected statement or 'return'")
            out.extend(self.stmt())
        return out

    def stmt(self):
        """Parse one statement; multi-declarator lines yield several nodes."""
        t = self.peek()
        if self.at("{"):
            return [self.block()]
        if self.at("if"):
            return [self.if_stmt()]
        if self.at("for"):
            return [self.for_stmt()]
        if self.at("break"):
            self.need_extended("break")
            tok = self.next()
            self.expect(";")
            return [Break(pos=tok.pos)]
        if self.at("continue"):
            self.need_extended("continue")
            tok = self.next()
            self.expect(";")
            return [Continue(pos=tok.pos)]
        if self.at("void"):
            return [self.fun_def()]
        if self.at_type():
            # function definition or declaration(s): disambiguate on '('.
            save = self.i
            self.type_annot()
            ident_ok = self.peek().kind == "identifier"
            is_fun = ident_ok and self.peek(1).lexeme == "("
            self.i = save
            if is_fun:
                return [self.fun_def()]
            return self.decl_stmt()
        if t.kind == "identifier":
            if self.peek(1).lexeme == "(":
                self.need_extended("call statements")
                call = self.expr_primary()
                self.expect(";")
                return [CallStmt(call, pos=t.pos)]
            return [self.assign_stmt()]
        self.fail(f"expected statement, found {t.lexeme!r}")

    def branch_stmt(self):
        stmts = self.stmt()
        if len(stmts) != 1:
            self.fail("multiple declarators not allowed here", stmts[0].pos)
        return stmts[0]

    def block(self):
        start = self.expect("{").pos
        stmts = []
        while not self.at("}"):
            if self.peek().kind == "eof":
                self.fail("unterminated block")
            stmts.extend(self.stmt())
        self.expect("}")
        return Block(stmts, pos=start)

    def if_stmt(self):
        start = self.expect("if").pos
        self.expect("(")
        cond = self.expr()
        self.expect(")")
        then = self.branch_stmt()
        if self.accept("else"):
            els = self.branch_stmt()
        else:
            self.need_extended("if without else")
            els = None
        return If(cond, then, els, pos=start)

    def for_stmt(self):
        start = self.expect("for").pos
        self.expect("(")
        counter = self.expect_ident()
        self.expect("<")
        bound = self.loop_bound()
        self.expect(")")
        body = self.branch_stmt()
        return For(counter.lexeme, bound, body, pos=start)

    def loop_bound(self):
        t = self.peek()
        if self.at("size"):
            self.next()
            self.expect("(")
            inner = self.expr()
            self.expect(")")
            return OpApp("size", [inner], pos=t.pos)
        if t.kind in ("decimal-literal", "binary-literal"):
            self.next()
            return Const(t.lexeme, pos=t.pos)
        self.fail("loop bound must be size(e) or an integer literal", t.pos)

    def fun_def(self):
        self.need_extended("function definitions")
        start = self.peek().pos
        if self.accept("void"):
            ret = None
        else:
            ret = self.type_annot()
        name = self.expect_ident()
        self.expect("(")
        params = self.params(allow_any_type=True)
        self.expect(")")
        self.expect("{")
        body = []
        while not self.at("return") and not self.at("}"):
            if self.peek().kind == "eof":
                self.fail("unterminated function body")
            body.extend(self.stmt())
        if self.accept("return"):
            ret_expr = self.expr()
            self.expect(";")
        else:
            if ret is not None:
                self.fail(f"function {name.lexeme!r} must end with a return statement")
            ret_expr = Const("0", pos=start)
        self.expect("}")
        if ret is None:
            ret = INT  # void sugar
        return FunDef(ret, name.lexeme, params, body, ret_expr, pos=start)

    def decl_stmt(self):
        annot = self.type_annot()
        out = []
        while True:
            name = self.expect_ident()
            if self.accept("="):
                self.need_extended("declaration initializers")
                out.append(DeclInit(annot, name.lexeme, self.expr(), pos=name.pos))
            else:
                out.append(Decl(annot, name.lexeme, pos=name.pos))
            if self.accept(","):
                self.need_extended("multiple declarators")
                continue
            break
        self.expect(";")
        return out

    def assign_stmt(self):
        lv = self.lvalue()
        t = self.peek()
        if self.accept("="):
            rhs = self.expr()
            self.expect(";")
            return Assign(lv, rhs, pos=t.pos)
        if t.lexeme in ("+=", "-="):
            self.need_extended(f"{t.lexeme} assignment")
            self.next()
            rhs = self.expr()
            self.expect(";")
            return AugAssign(t.lexeme[0], lv, rhs, pos=t.pos)
        if self.accept("++"):
            self.need_extended("++ statements")
            self.expect(";")
            return Incr(lv, pos=t.pos)
        self.fail(f"expected assignment operator, found {t.lexeme!r}")

    def lvalue(self):
        name = self.expect_ident()
        node = Var(name.lexeme, pos=name.pos)
        while self.at("["):
            self.need_extended("array indexing")
            lb = self.next()
            idx = self.expr()
            self.expect("]")
            node = Index(node, idx, pos=lb.pos)
        return node

    # -- expressions --------------------------------------------------------

    def expr(self, level=0):
        if level >= len(BIN_LEVELS):
            return self.expr_unary()
        node = self.expr(level + 1)
        ops = BIN_LEVELS[level]
        while self.peek().kind == "operator-symbol" and self.peek().lexeme in ops:
            t = self.next()
            rhs = self.expr(level + 1)
            node = OpApp(t.lexeme, [node, rhs], pos=t.pos)
        return node

    def expr_unary(self):
        t = self.peek()
        if t.kind == "operator-symbol" and t.lexeme in ("!", "-"):
            self.next()
            return OpApp(t.lexeme, [self.expr_unary()], pos=t.pos)
        return self.expr_postfix()

    def expr_postfix(self):
        node = self.expr_primary()
        while self.at("["):
            self.need_extended("array indexing")
            lb = self.next()
            idx = self.expr()
            self.expect("]")
            node = Index(node, idx, pos=lb.pos)
        return node

    def expr_primary(self):
        t = self.peek()
        if t.kind in ("decimal-literal", "binary-literal"):
            self.next()
            return Const(t.lexeme, pos=t.pos)
        if t.lexeme in ("true", "false"):
            self.next()
            return Const(t.lexeme, pos=t.pos)
        if t.kind == "string-literal":
            self.need_extended("string literals")
            self.next()
            return Const(t.lexeme, pos=t.pos)
        if self.at("size"):
            self.next()
            self.expect("(")
            arg = self.expr()
            self.expect(")")
            return OpApp("size", [arg], pos=t.pos)
        if self.at("array"):
            self.need_extended("array constructors")
            self.next()
            self.expect("(")
            length = self.expr()
            self.expect(")")
            return ArrayCtor(length, pos=t.pos)
        if self.at("("):
            self.next()
            inner = self.expr()
            self.expect(")")
            return Paren(inner, pos=t.pos)
        if t.kind == "identifier":
            self.next()
            if self.at("("):
                self.need_extended("function calls")
                self.next()
                args = []
                if not self.at(")"):
                    while True:
                        args.append(self.expr())
                        if not self.accept(","):
                            break
                self.expect(")")
                return Call(t.lexeme, args, pos=t.pos)
            return Var(t.lexeme, pos=t.pos)
        self.fail(f"expected expression, found {t.lexeme!r}")
