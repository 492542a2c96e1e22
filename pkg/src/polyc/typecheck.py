"""Typing rules: environments, the Asg predicate and the program checker.

The checker enforces the iterable-variable restrictions that make every
well-typed program terminate: iterable variables may not be declared or
assigned inside any loop (or function) body, and only iterable operands may
appear under size().
"""

from dataclasses import dataclass, field

from .ast import (
    ArrayCtor, ArrayT, Arrow, Assign, Block, Break, Call, CallStmt, Const,
    Continue, Decl, For, FunDef, If, Index, OpApp, Paren, Program, Var,
    BOOL, IINT, INT, ISTRING, STRING, NO_POS, Pos,
    is_int_type, is_iterable_type, is_string_type, type_class,
    subtype_of,
)

BOOL_OPS = {"&&", "||", "!"}
CMP_OPS = {">=", "<=", ">", "<", "==", "!="}
ARITH_OPS = {"+", "-", "/", "%"}
BUILTIN_FUNCS = ("min", "max", "concat")


class _BuiltinMarker:
    def __init__(self, name):
        self.name = name

    def __repr__(self):
        return f"<builtin {self.name}>"


def decl_site(node):
    """Hashable identity of a declaration statement."""
    return ("decl", node.name, id(node))


def param_site(owner_name, index, node):
    return ("param", owner_name, index, id(node))


def counter_site(node):
    return ("counter", node.counter, id(node))


BUILTINS = {name: _BuiltinMarker(name) for name in BUILTIN_FUNCS}


@dataclass(frozen=True)
class Diag:
    """One type error: kind, rendered message, position, offending names."""

    kind: str
    message: str
    pos: Pos = NO_POS
    names: tuple = ()
    sites: tuple = field(default=(), compare=False)

    def render(self, filename="<input>"):
        return f"{filename}:{self.pos.line}:{self.pos.col}: {self.kind}: {self.message}"

    def to_json(self):
        return {
            "kind": self.kind,
            "message": self.message,
            "line": self.pos.line,
            "col": self.pos.col,
            "names": list(self.names),
        }


class TypingEnv:
    """Finite partial map from names to type annotations.

    Updates return a new environment; lookups of unbound names give None.
    Each binding remembers its declaration site so the complexity analysis
    can map diagnostics back to declarations.
    """

    def __init__(self, bindings=None):
        self._b = dict(bindings) if bindings else {}

    def lookup(self, name):
        entry = self._b.get(name)
        return entry[0] if entry else None

    def site(self, name):
        entry = self._b.get(name)
        return entry[1] if entry else None

    def update(self, name, annot, site=None):
        child = TypingEnv(self._b)
        child._b[name] = (annot, site)
        return child

    def __contains__(self, name):
        return name in self._b

    def domain(self):
        return set(self._b)

    def iterable_domain(self):
        return {n for n, (t, _) in self._b.items()
                if not isinstance(t, (Arrow, _BuiltinMarker)) and is_iterable_type(t)}


def initial_env(mode):
    if mode == "extended":
        return TypingEnv({n: (m, None) for n, m in BUILTINS.items()})
    return TypingEnv()


def const_type(text):
    if text in ("true", "false"):
        return BOOL
    if text.startswith('"'):
        return ISTRING
    return IINT


def sup_type(types):
    for t in types:
        if not is_int_type(t):
            raise ValueError(f"sup_type over non-integer type {t}")
    return IINT if all(t is IINT for t in types) else INT


def type_equiv(t1, t2):
    return type_class(t1) == type_class(t2)


def asg_predicate(loop_indicator, annot):
    return not (loop_indicator and is_iterable_type(annot))


def op_signature(op, argtypes, extended=False):
    """Partial typing map for operators; None when outside the domain."""
    if op in BOOL_OPS:
        arity = 1 if op == "!" else 2
        if len(argtypes) == arity and all(t is BOOL for t in argtypes):
            return BOOL
        return None
    if op in CMP_OPS:
        if len(argtypes) != 2:
            return None
        if all(is_int_type(t) for t in argtypes):
            return BOOL
        if extended and op in ("==", "!="):
            # equality also covers strings and booleans in extended mode
            if all(is_string_type(t) for t in argtypes):
                return BOOL
            if all(t is BOOL for t in argtypes):
                return BOOL
        return None
    if op in ARITH_OPS:
        if op == "-" and len(argtypes) == 1 and is_int_type(argtypes[0]):
            return argtypes[0]
        if len(argtypes) == 2 and all(is_int_type(t) for t in argtypes):
            return sup_type(argtypes)
        return None
    if op == "size":
        if len(argtypes) != 1:
            return None
        if argtypes[0] is IINT:
            return IINT
        if extended and argtypes[0] is ISTRING:
            return IINT
        return None
    if extended and op in ("min", "max"):
        if len(argtypes) == 2 and all(is_int_type(t) for t in argtypes):
            return sup_type(argtypes)
        return None
    if extended and op == "concat":
        if (len(argtypes) == 2 and is_string_type(argtypes[0])
                and argtypes[1] is ISTRING):
            return STRING
        return None
    return None


@dataclass
class CheckResult:
    type: object  # INT when well typed, else None
    errors: list

    @property
    def ok(self):
        return not self.errors


def check_program(prog, mode="core"):
    checker = Checker(mode)
    t = checker.program(prog)
    return CheckResult(t, checker.errors)


def check_expr(env, loop_indicator, expr, mode="core"):
    """Type one expression; raises on the first error (operation surface)."""
    checker = Checker(mode)
    t = checker.expr(env, loop_indicator, expr)
    if checker.errors:
        raise TypeCheckFailure(checker.errors)
    return t


def check_stmt(env, loop_indicator, stmt, mode="core"):
    checker = Checker(mode)
    env2 = checker.stmt(env, loop_indicator, stmt)
    if checker.errors:
        raise TypeCheckFailure(checker.errors)
    return env2


class TypeCheckFailure(Exception):
    def __init__(self, errors):
        super().__init__("; ".join(d.message for d in errors))
        self.errors = errors


class Checker:
    def __init__(self, mode="core"):
        self.mode = mode
        self.extended = mode == "extended"
        self.errors = []
        self.fn_stack = []

    def diag(self, kind, message, pos, names=(), sites=()):
        self.errors.append(Diag(kind, message, pos, tuple(names), tuple(sites)))

    # -- expressions --------------------------------------------------------

    def expr(self, env, l, e):
        """Returns the type annotation, or None after reporting errors."""
        if isinstance(e, Var):
            t = env.lookup(e.name)
            if t is None:
                self.diag("unbound-variable", f"variable {e.name!r} is not declared",
                          e.pos, names=(e.name,))
                return None
            if isinstance(t, (Arrow, _BuiltinMarker)):
                self.diag("operand-type-mismatch",
                          f"function {e.name!r} used as a value", e.pos, names=(e.name,))
                return None
            return t
        if isinstance(e, Const):
            return const_type(e.text)
        if isinstance(e, Paren):
            return self.expr(env, l, e.inner)
        if isinstance(e, OpApp):
            argts = [self.expr(env, l, a) for a in e.args]
            if any(t is None for t in argts):
                return None
            res = op_signature(e.op, argts, self.extended)
            if res is None:
                shown = ",".join(str(t) for t in argts)
                if e.op == "size":
                    msg = f"size needs an iterable operand, got {shown}"
                else:
                    msg = f"operator {e.op!r} not defined on ({shown})"
                self.diag("operand-type-mismatch", msg, e.pos,
                          names=self._var_names(e))
                return None
            return res
        if isinstance(e, Call):
            return self.call(env, l, e)
        if isinstance(e, Index):
            return self.index(env, l, e)
        if isinstance(e, ArrayCtor):
            self.diag("operand-type-mismatch",
                      "array constructor is only allowed as the right-hand side "
                      "of an assignment to an array variable", e.pos)
            return None
        raise TypeError(f"cannot check expression {e!r}")

    def call(self, env, l, e):
        argts = [self.expr(env, l, a) for a in e.args]
        ft = env.lookup(e.fname)
        if ft is None:
            if self.fn_stack and e.fname in self.fn_stack:
                self.diag("recursion-attempt",
                          f"function {e.fname!r} cannot call itself", e.pos,
                          names=(e.fname,))
            else:
                self.diag("unbound-variable", f"function {e.fname!r} is not defined",
                          e.pos, names=(e.fname,))
            return None
        if any(t is None for t in argts):
            return None
        if isinstance(ft, _BuiltinMarker):
            res = op_signature(e.fname, argts, self.extended)
            if res is None:
                shown = ",".join(str(t) for t in argts)
                self.diag("operand-type-mismatch",
                          f"builtin {e.fname!r} not defined on ({shown})", e.pos)
            return res
        if not isinstance(ft, Arrow):
            self.diag("operand-type-mismatch", f"{e.fname!r} is not a function",
                      e.pos, names=(e.fname,))
            return None
        if len(argts) != len(ft.params):
            self.diag("arity-mismatch",
                      f"{e.fname!r} expects {len(ft.params)} arguments, got {len(argts)}",
                      e.pos, names=(e.fname,))
            return None
        for i, (got, want) in enumerate(zip(argts, ft.params)):
            if subtype_of(got, want):
                continue
            if type_class(got) == type_class(want):
                self.diag("param-subtype-violation",
                          f"argument {i + 1} of {e.fname!r} must be {want}, got "
                          f"non-iterable {got}", e.pos, names=(e.fname,))
            else:
                self.diag("operand-type-mismatch",
                          f"argument {i + 1} of {e.fname!r} must be {want}, got {got}",
                          e.pos, names=(e.fname,))
            return None
        return ft.ret

    def index(self, env, l, e):
        base = self.expr(env, l, e.base)
        idx = self.expr(env, l, e.index)
        if idx is not None and not is_int_type(idx):
            self.diag("operand-type-mismatch", "index must be an integer", e.pos)
            return None
        if base is None:
            return None
        if isinstance(base, ArrayT):
            return base.elem
        if is_string_type(base):
            return STRING
        self.diag("operand-type-mismatch", f"cannot index into {base}", e.pos)
        return None

    def _var_names(self, e):
        from .ast import walk_exprs

        return tuple(sorted({sub.name for sub in walk_exprs(e) if isinstance(sub, Var)}))

    # -- statements ---------------------------------------------------------

    def stmt(self, env, l, s):
        if isinstance(s, Decl):
            return self.decl(env, l, s)
        if isinstance(s, Assign):
            return self.assign(env, l, s)
        if isinstance(s, Block):
            inner = env
            for st in s.stmts:
                inner = self.stmt(inner, l, st)
            return env  # block scoping: declarations do not escape
        if isinstance(s, If):
            ct = self.expr(env, l, s.cond)
            if ct is not None and ct is not BOOL:
                self.diag("operand-type-mismatch",
                          f"condition must be bool, got {ct}", s.pos,
                          names=self._var_names(s.cond))
            self.stmt(env, l, s.then)
            self.stmt(env, l, s.els)
            return env
        if isinstance(s, For):
            return self.loop(env, l, s)
        if isinstance(s, FunDef):
            return self.fundef(env, l, s)
        if isinstance(s, (Break, Continue)):
            if not l:
                word = "break" if isinstance(s, Break) else "continue"
                self.diag("misplaced-break", f"{word} outside of any loop", s.pos)
            return env
        if isinstance(s, CallStmt):
            self.expr(env, l, s.call)
            return env
        raise TypeError(f"cannot check statement {s!r} (desugar first)")

    def decl(self, env, l, s):
        if not asg_predicate(l, s.annot):
            self.diag("iterable-decl-in-loop",
                      f"cannot declare iterable variable {s.name!r} inside a "
                      "loop or function body", s.pos, names=(s.name,),
                      sites=(decl_site(s),))
        if s.name in env:
            self.diag("redeclaration", f"variable {s.name!r} already declared",
                      s.pos, names=(s.name,))
        return env.update(s.name, s.annot, site=decl_site(s))

    def assign(self, env, l, s):
        rhs_t = None
        lv = s.lvalue
        if isinstance(lv, Var):
            t = env.lookup(lv.name)
            if t is None:
                self.diag("unbound-variable",
                          f"assignment to undeclared variable {lv.name!r}", s.pos,
                          names=(lv.name,))
                self.rhs_type(env, l, s.expr, None)
                return env
            if isinstance(t, (Arrow, _BuiltinMarker)):
                self.diag("operand-type-mismatch",
                          f"cannot assign to function {lv.name!r}", s.pos,
                          names=(lv.name,))
                return env
            if not asg_predicate(l, t):
                self.diag("iterable-assignment-in-loop",
                          f"cannot assign to iterable variable {lv.name!r} inside "
                          "a loop or function body", s.pos, names=(lv.name,),
                          sites=(env.site(lv.name),))
            rhs_t = self.rhs_type(env, l, s.expr, t)
            if rhs_t is not None and not type_equiv(t, rhs_t):
                self.diag("operand-type-mismatch",
                          f"cannot assign {rhs_t} to {lv.name!r} of type {t}",
                          s.pos, names=(lv.name,))
            return env
        if isinstance(lv, Index):
            base = lv
            while isinstance(base, Index):
                idx_t = self.expr(env, l, base.index)
                if idx_t is not None and not is_int_type(idx_t):
                    self.diag("operand-type-mismatch",
                              "index must be an integer", base.pos)
                base = base.base
            if not isinstance(base, Var):
                self.diag("operand-type-mismatch",
                          "assignment target must be a variable or an index "
                          "chain over a variable", s.pos)
                return env
            var_t = env.lookup(base.name)
            if var_t is None:
                self.diag("unbound-variable",
                          f"assignment to undeclared variable {base.name!r}",
                          s.pos, names=(base.name,))
                return env
            # Asg is judged on the variable's own (non-iterable) type.
            if not asg_predicate(l, var_t):
                self.diag("iterable-assignment-in-loop",
                          f"cannot assign to iterable variable {base.name!r} "
                          "inside a loop or function body", s.pos,
                          names=(base.name,), sites=(env.site(base.name),))
            elem_t = var_t
            node = s.lvalue
            chain = []
            while isinstance(node, Index):
                chain.append(node)
                node = node.base
            for _ in reversed(chain):
                if isinstance(elem_t, ArrayT):
                    elem_t = elem_t.elem
                elif is_string_type(elem_t):
                    self.diag("operand-type-mismatch",
                              "strings are immutable, cannot assign to an index",
                              s.pos, names=(base.name,))
                    return env
                else:
                    self.diag("operand-type-mismatch",
                              f"cannot index into {elem_t}", s.pos,
                              names=(base.name,))
                    return env
            rhs_t = self.rhs_type(env, l, s.expr, elem_t)
            if rhs_t is not None and not type_equiv(elem_t, rhs_t):
                self.diag("operand-type-mismatch",
                          f"cannot assign {rhs_t} to element of type {elem_t}",
                          s.pos, names=(base.name,))
            return env
        self.diag("operand-type-mismatch",
                  "assignment target must be a variable or an index chain",
                  s.pos)
        return env

    def rhs_type(self, env, l, rhs, target_t):
        """Type an assignment right-hand side, giving array constructors
        their element annotation from the target."""
        if isinstance(rhs, ArrayCtor):
            if not self.extended:
                self.diag("operand-type-mismatch",
                          "array constructors require extended mode", rhs.pos)
                return None
            lt = self.expr(env, l, rhs.length)
            if lt is not None and not is_int_type(lt):
                self.diag("operand-type-mismatch",
                          "array length must be an integer", rhs.pos)
            if isinstance(target_t, ArrayT):
                rhs.elem = target_t.elem
                return target_t
            if target_t is not None:
                self.diag("operand-type-mismatch",
                          f"array constructor assigned to non-array type {target_t}",
                          rhs.pos)
            return None
        return self.expr(env, l, rhs)

    def loop(self, env, l, s):
        bound = s.bound
        if isinstance(bound, OpApp) and bound.op == "size":
            operand_t = self.expr(env, l, bound.args[0])
            if operand_t is not None and not is_iterable_type(operand_t):
                self.diag("non-iterable-loop-bound",
                          f"loop bound size(...) needs an iterable operand, got "
                          f"{operand_t}", s.pos,
                          names=self._var_names(bound.args[0]))
        elif isinstance(bound, Const) and bound.text[0].isdigit():
            pass  # literal bounds are input-independent constants
        else:
            self.diag("non-iterable-loop-bound",
                      "loop bound must be size(e) or an integer literal", s.pos)
        if s.counter in env:
            self.diag("redeclaration",
                      f"loop counter {s.counter!r} shadows an existing variable",
                      s.pos, names=(s.counter,))
        body_env = env.update(s.counter, IINT, site=counter_site(s))
        self.stmt(body_env, True, s.body)
        return env

    def fundef(self, env, l, s):
        if s.name in env and not isinstance(env.lookup(s.name), _BuiltinMarker):
            # builtins are ambient and may be shadowed by a user definition
            self.diag("redeclaration", f"function name {s.name!r} already bound",
                      s.pos, names=(s.name,))
        seen = set()
        inner = env
        for i, (t, n) in enumerate(s.params):
            if n in seen:
                self.diag("redeclaration",
                          f"duplicate parameter {n!r} in function {s.name!r}",
                          s.pos, names=(n,))
            seen.add(n)
            inner = inner.update(n, t, site=param_site(s.name, i, s))
        self.fn_stack.append(s.name)
        for st in s.body:
            inner = self.stmt(inner, True, st)
        rt = self.expr(inner, True, s.ret_expr)
        self.fn_stack.pop()
        if rt is not None and not type_equiv(rt, s.ret):
            self.diag("bad-return-type",
                      f"function {s.name!r} declares return type {s.ret} but "
                      f"returns {rt}", s.pos, names=(s.name,))
        arrow = Arrow(tuple(t for t, _ in s.params), s.ret)
        return env.update(s.name, arrow, site=decl_site(s))

    # -- programs -----------------------------------------------------------

    def program(self, prog):
        env = initial_env(self.mode)
        seen = set()
        for i, (t, n) in enumerate(prog.params):
            if n in seen:
                self.diag("redeclaration", f"duplicate parameter {n!r}", prog.pos,
                          names=(n,))
            seen.add(n)
            if self.mode == "core" and t is not INT:
                self.diag("operand-type-mismatch",
                          "main parameters must be int in core mode", prog.pos,
                          names=(n,))
            env = env.update(n, t, site=param_site("main", i, prog))
        for s in prog.body:
            env = self.stmt(env, False, s)
        rt = self.expr(env, False, prog.ret_expr)
        if rt is not None and not is_int_type(rt):
            self.diag("bad-return-type",
                      f"program must return an integer, got {rt}",
                      prog.ret_expr.pos, names=self._var_names(prog.ret_expr))
        return INT if not self.errors else None
