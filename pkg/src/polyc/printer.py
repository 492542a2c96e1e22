"""Pretty printer. Output reparses to a structurally identical AST.

The printer never invents grouping for ASTs produced by the parser or by the
code generators in this package: those keep explicit Paren nodes wherever the
infix surface form needs parentheses.  For other ASTs it still emits correct
(semantics-preserving) parentheses, at the cost of the exact round trip.
"""

from .ast import (
    ArrayCtor, Assign, AugAssign, Block, Break, Call, CallStmt, Const,
    Continue, Decl, DeclInit, For, FunDef, If, Incr, Index, OpApp, Paren,
    Program, Var,
)
from .parser import BIN_LEVELS

_MAX_LEVEL = len(BIN_LEVELS)
_OP_LEVEL = {op: lv for lv, ops in enumerate(BIN_LEVELS) for op in ops}


def _ends_open(s):
    """True if an unbraced rendering of s ends with an else-less if."""
    if isinstance(s, If):
        return s.els is None or _ends_open(s.els)
    if isinstance(s, For):
        return _ends_open(s.body)
    return False


def expr_level(e):
    if isinstance(e, OpApp):
        if e.op == "size":
            return _MAX_LEVEL
        if len(e.args) == 1:
            return _MAX_LEVEL  # unary ! and -
        return _OP_LEVEL[e.op]
    return _MAX_LEVEL


def expr_str(e, min_level=0):
    s = _expr_str(e)
    if expr_level(e) < min_level:
        return f"({s})"
    return s


def _expr_str(e):
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Const):
        return e.text
    if isinstance(e, Paren):
        return f"({expr_str(e.inner)})"
    if isinstance(e, OpApp):
        if e.op == "size":
            return f"size({expr_str(e.args[0])})"
        if len(e.args) == 1:
            return e.op + expr_str(e.args[0], _MAX_LEVEL)
        lv = _OP_LEVEL[e.op]
        left = expr_str(e.args[0], lv)
        right = expr_str(e.args[1], lv + 1)
        return f"{left}{e.op}{right}"
    if isinstance(e, Call):
        args = ",".join(expr_str(a) for a in e.args)
        return f"{e.fname}({args})"
    if isinstance(e, Index):
        return f"{expr_str(e.base, _MAX_LEVEL)}[{expr_str(e.index)}]"
    if isinstance(e, ArrayCtor):
        return f"array({expr_str(e.length)})"
    raise TypeError(f"cannot print expression {e!r}")


class _Emitter:
    def __init__(self):
        self.lines = []
        self.depth = 0

    def line(self, text):
        self.lines.append("    " * self.depth + text)

    def stmt(self, s):
        if isinstance(s, Decl):
            self.line(f"{s.annot} {s.name};")
        elif isinstance(s, DeclInit):
            self.line(f"{s.annot} {s.name}={expr_str(s.init)};")
        elif isinstance(s, Assign):
            self.line(f"{expr_str(s.lvalue)}={expr_str(s.expr)};")
        elif isinstance(s, AugAssign):
            self.line(f"{expr_str(s.lvalue)}{s.op}={expr_str(s.expr)};")
        elif isinstance(s, Incr):
            self.line(f"{expr_str(s.lvalue)}++;")
        elif isinstance(s, Break):
            self.line("break;")
        elif isinstance(s, Continue):
            self.line("continue;")
        elif isinstance(s, CallStmt):
            self.line(f"{expr_str(s.call)};")
        elif isinstance(s, Block):
            self.open_block("")
            for inner in s.stmts:
                self.stmt(inner)
            self.close_block()
        elif isinstance(s, If):
            self.if_chain(s, prefix="")
        elif isinstance(s, For):
            head = f"for({s.counter}<{expr_str(s.bound)})"
            self.attach_body(head, s.body)
        elif isinstance(s, FunDef):
            params = ",".join(f"{t} {n}" for t, n in s.params)
            self.line(f"{s.ret} {s.name}({params}){{")
            self.depth += 1
            for inner in s.body:
                self.stmt(inner)
            self.line(f"return {expr_str(s.ret_expr)};")
            self.depth -= 1
            self.line("}")
        else:
            raise TypeError(f"cannot print statement {s!r}")

    def if_chain(self, s, prefix):
        head = f"{prefix}if({expr_str(s.cond)})"
        if s.els is None:
            self.attach_body(head, s.then)
            return
        if not isinstance(s.then, Block) and _ends_open(s.then):
            # a bare then-branch would steal the else on reparse
            self.line(head + " {")
            self.depth += 1
            self.stmt(s.then)
            self.depth -= 1
            self.else_part("} else", s.els)
            return
        if isinstance(s.then, Block):
            if s.then.stmts:
                self.line(head + " {")
                self.depth += 1
                for inner in s.then.stmts:
                    self.stmt(inner)
                self.depth -= 1
                self.else_part("} else", s.els)
            else:
                self.else_part(head + " { } else", s.els)
        else:
            self.line(head)
            self.depth += 1
            self.stmt(s.then)
            self.depth -= 1
            self.else_part("else", s.els)

    def else_part(self, lead, els):
        if isinstance(els, Block):
            if els.stmts:
                self.line(lead + " {")
                self.depth += 1
                for inner in els.stmts:
                    self.stmt(inner)
                self.depth -= 1
                self.line("}")
            else:
                self.line(lead + " {}")
        elif isinstance(els, If):
            self.if_chain(els, prefix=lead + " ")
        else:
            self.line(lead)
            self.depth += 1
            self.stmt(els)
            self.depth -= 1

    def attach_body(self, head, body):
        if isinstance(body, Block):
            if body.stmts:
                self.line(head + " {")
                self.depth += 1
                for inner in body.stmts:
                    self.stmt(inner)
                self.depth -= 1
                self.line("}")
            else:
                self.line(head + " { }")
        elif isinstance(body, (Decl, DeclInit, Assign, AugAssign, Incr, Break,
                               Continue, CallStmt)):
            save = len(self.lines)
            self.stmt(body)
            self.lines[save] = "    " * self.depth + head + " " + self.lines[save].lstrip()
        else:
            self.line(head)
            self.depth += 1
            self.stmt(body)
            self.depth -= 1

    def open_block(self, head):
        self.line(head + "{")
        self.depth += 1

    def close_block(self):
        self.depth -= 1
        self.line("}")


def pretty_print(prog, mode_marker=None):
    """Render a Program back to source text."""
    em = _Emitter()
    if mode_marker:
        em.line(f"// mode: {mode_marker}")
    params = ",".join(f"{t} {n}" for t, n in prog.params)
    em.line(f"int main({params}){{")
    em.depth += 1
    for s in prog.body:
        em.stmt(s)
    em.line(f"return {expr_str(prog.ret_expr)};")
    em.depth -= 1
    em.line("}")
    return "\n".join(em.lines) + "\n"


def stmt_str(s):
    """Render a single statement (testing convenience)."""
    em = _Emitter()
    em.stmt(s)
    return "\n".join(em.lines)
