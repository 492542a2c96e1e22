"""Source-to-source transforms: the max-value tracker, the step-count
tracker, function inlining, the single-loop normalizer and a bounded
equivalence checker.

The normalizer compiles a program into a budget-driven machine: one loop
over size(y) whose body dispatches on an explicit program counter, with all
locals hoisted (iterable locals demoted to plain int) and every size()
occurrence replaced by an incremental bit-length computation.  Consecutive
forward steps run within a single budget iteration, so the budget needed is
about one tick per loop back-edge of the original program.
"""

from dataclasses import dataclass

from .ast import (
    Assign, Block, Break, Call, CallStmt, Const, Continue, Decl, For, FunDef,
    If, Index, OpApp, Paren, Program, Var, BOOL, IINT, INT, is_int_type,
    fresh_name, program_names, walk_exprs, walk_stmts, stmt_exprs,
)
from .errors import ArgumentError, PolycError
from .interp import run_program
from .values import format_value


class TransformError(PolycError):
    label = "transform error"


def _num(n):
    return Const(str(n))


# ---------------------------------------------------------------------------
# T1: track the maximum absolute value reached


def t1_max_tracker(prog):
    """Instrument a core program so it returns the largest absolute value
    any integer assignment (or the return expression) ever produced."""
    o = fresh_name("o", program_names(prog))
    env = {n: t for t, n in prog.params}
    body = _t1_stmts(prog.body, env, o)
    cut = 0
    while cut < len(body) and isinstance(body[cut], Decl):
        cut += 1
    body.insert(cut, Decl(INT, o))
    body.extend([
        _t1_guard(prog.ret_expr, o, paren=True),
        _t1_guard_neg(prog.ret_expr, o, paren=True),
    ])
    return Program(list(prog.params), body, Var(o))


def _t1_guard(e, o, paren=False):
    return If(OpApp(">", [e, Var(o)]),
              Block([Assign(Var(o), e)]), Block([]))


def _t1_guard_neg(e, o, paren=False):
    neg = OpApp("-", [Paren(e) if paren else e])
    return If(OpApp(">", [neg, Var(o)]),
              Block([Assign(Var(o), neg)]), Block([]))


def _t1_stmts(stmts, env, o):
    out = []
    for s in stmts:
        out.append(_t1_stmt(s, env, o))
    return out


def _t1_stmt(s, env, o):
    if isinstance(s, Decl):
        env[s.name] = s.annot
        return s
    if isinstance(s, Assign):
        if isinstance(s.lvalue, Var) and is_int_type(env.get(s.lvalue.name, INT)):
            x = Var(s.lvalue.name)
            return Block([s, _t1_guard(x, o), _t1_guard_neg(x, o)])
        return s
    if isinstance(s, Block):
        saved = dict(env)
        inner = _t1_stmts(s.stmts, env, o)
        env.clear()
        env.update(saved)
        return Block(inner)
    if isinstance(s, If):
        return If(s.cond, _t1_stmt(s.then, env, o), _t1_stmt(s.els, env, o))
    if isinstance(s, For):
        saved = dict(env)
        env[s.counter] = IINT
        body = _t1_stmt(s.body, env, o)
        env.clear()
        env.update(saved)
        return For(s.counter, s.bound, body)
    raise TransformError(f"max tracker expects a core program, found "
                         f"{type(s).__name__}", getattr(s, "pos", None))


# ---------------------------------------------------------------------------
# T2: track the executed declaration/assignment count


def t2_cost_tracker(prog):
    """Instrument a core program with a doubling accumulator: after the run,
    size(o) - 1 equals the number of executed declarations, assignments and
    empty blocks."""
    o = fresh_name("o", program_names(prog))
    body = [Decl(INT, o), Assign(Var(o), Const("1"))]
    body.extend(_t2_stmt(s, o) for s in prog.body)
    return Program(list(prog.params), body, prog.ret_expr)


def _t2_double(o):
    return Assign(Var(o), OpApp("+", [Var(o), Var(o)]))


def _t2_stmt(s, o):
    if isinstance(s, (Decl, Assign)):
        return Block([s, _t2_double(o)])
    if isinstance(s, Block):
        if not s.stmts:
            return Block([_t2_double(o)])
        return Block([_t2_stmt(inner, o) for inner in s.stmts])
    if isinstance(s, If):
        return If(s.cond, _t2_stmt(s.then, o), _t2_stmt(s.els, o))
    if isinstance(s, For):
        return For(s.counter, s.bound, _t2_stmt(s.body, o))
    raise TransformError(f"cost tracker expects a core program, found "
                         f"{type(s).__name__}", getattr(s, "pos", None))


# ---------------------------------------------------------------------------
# function inlining


def inline_functions(prog):
    """Rewrite every call in an inline style; functions must only reference
    their parameters, their own locals and previously defined functions."""
    ctx = _Inliner()
    body = ctx.stmts(prog.body, collect_funs=True)
    prelude, ret = ctx.expr(prog.ret_expr, body)
    del prelude  # statements were appended to body in place
    return Program(list(prog.params), body, ret)


class _Inliner:
    def __init__(self):
        self.funcs = {}
        self.counter = 0

    def stmts(self, stmts, collect_funs=False):
        out = []
        for s in stmts:
            if isinstance(s, FunDef):
                if not collect_funs:
                    raise TransformError(
                        "nested function definitions are not inlinable", s.pos)
                self._check_param_pure(s)
                self.funcs[s.name] = s
                continue
            out.extend(self.stmt(s))
        return out

    def _check_param_pure(self, f):
        allowed = {n for _, n in f.params} | set(self.funcs) | {"min", "max", "concat"}
        for s in walk_stmts(f.body):
            if isinstance(s, Decl):
                allowed.add(s.name)
            elif isinstance(s, For):
                allowed.add(s.counter)
            elif isinstance(s, FunDef):
                raise TransformError(
                    f"function {f.name!r} defines a nested function", s.pos)
        exprs = [f.ret_expr]
        for s in walk_stmts(f.body):
            exprs.extend(stmt_exprs(s))
        for e in exprs:
            for sub in walk_exprs(e):
                if isinstance(sub, Var) and sub.name not in allowed:
                    raise TransformError(
                        f"function {f.name!r} reads captured variable "
                        f"{sub.name!r}; cannot inline", sub.pos)
                if isinstance(sub, Call) and sub.fname not in allowed:
                    raise TransformError(
                        f"function {f.name!r} calls unknown {sub.fname!r}",
                        sub.pos)

    def stmt(self, s):
        pre = []
        if isinstance(s, Assign):
            e = self.expr_into(s.expr, pre)
            lv = self.expr_into(s.lvalue, pre)
            return pre + [Assign(lv, e)]
        if isinstance(s, (Decl, Break, Continue)):
            return [s]
        if isinstance(s, Block):
            return [Block(self.stmts(s.stmts))]
        if isinstance(s, If):
            cond = self.expr_into(s.cond, pre)
            return pre + [If(cond, Block(self.stmt(s.then)),
                             Block(self.stmt(s.els)))]
        if isinstance(s, For):
            bound = self.expr_into(s.bound, pre)
            return pre + [For(s.counter, bound, Block(self.stmt(s.body)))]
        if isinstance(s, CallStmt):
            self.expr_into(s.call, pre)
            return pre  # the call's effects live in the prelude
        raise TransformError(f"cannot inline inside {type(s).__name__}",
                             getattr(s, "pos", None))

    def expr(self, e, out_stmts):
        pre = []
        e2 = self.expr_into(e, pre)
        out_stmts.extend(pre)
        return pre, e2

    def expr_into(self, e, pre):
        if isinstance(e, (Var, Const)):
            return e
        if isinstance(e, Paren):
            return Paren(self.expr_into(e.inner, pre))
        if isinstance(e, OpApp):
            return OpApp(e.op, [self.expr_into(a, pre) for a in e.args])
        if isinstance(e, Index):
            return Index(self.expr_into(e.base, pre),
                         self.expr_into(e.index, pre))
        if isinstance(e, Call):
            args = [self.expr_into(a, pre) for a in e.args]
            if e.fname not in self.funcs:
                if e.fname in ("min", "max", "concat"):
                    return Call(e.fname, args)
                raise TransformError(f"call to unknown function {e.fname!r}",
                                     e.pos)
            return self.expand(self.funcs[e.fname], args, pre)
        raise TransformError(f"cannot inline inside expression {e!r}",
                             getattr(e, "pos", None))

    def expand(self, f, args, pre):
        self.counter += 1
        tag = f"_{f.name}{self.counter}"
        rename = {}
        for (t, n), a in zip(f.params, args):
            rename[n] = n + tag
            pre.append(Decl(t, n + tag))
            pre.append(Assign(Var(n + tag), a))
        body = _rename_stmts(f.body, rename, tag)
        body = self.stmts(body)  # expand nested calls
        ret_t = f.ret
        ret_name = f"_ret{tag}"
        pre.append(Decl(ret_t, ret_name))
        pre.extend(body)
        ret_pre = []
        ret_expr = self.expr_into(_rename_expr(f.ret_expr, rename), ret_pre)
        pre.extend(ret_pre)
        pre.append(Assign(Var(ret_name), ret_expr))
        return Var(ret_name)


def _rename_stmts(stmts, rename, tag):
    out = []
    for s in stmts:
        if isinstance(s, Decl):
            rename[s.name] = s.name + tag
            out.append(Decl(s.annot, rename[s.name], pos=s.pos))
        elif isinstance(s, Assign):
            out.append(Assign(_rename_expr(s.lvalue, rename),
                              _rename_expr(s.expr, rename), pos=s.pos))
        elif isinstance(s, Block):
            out.append(Block(_rename_stmts(s.stmts, dict(rename), tag), pos=s.pos))
        elif isinstance(s, If):
            out.append(If(_rename_expr(s.cond, rename),
                          _rename_stmts([s.then], dict(rename), tag)[0],
                          _rename_stmts([s.els], dict(rename), tag)[0],
                          pos=s.pos))
        elif isinstance(s, For):
            inner = dict(rename)
            inner[s.counter] = s.counter + tag
            out.append(For(s.counter + tag, _rename_expr(s.bound, rename),
                           _rename_stmts([s.body], inner, tag)[0], pos=s.pos))
        elif isinstance(s, (Break, Continue)):
            out.append(s)
        elif isinstance(s, CallStmt):
            out.append(CallStmt(_rename_expr(s.call, rename), pos=s.pos))
        else:
            raise TransformError(f"cannot rename {type(s).__name__}",
                                 getattr(s, "pos", None))
    return out


def _rename_expr(e, rename):
    if isinstance(e, Var):
        return Var(rename.get(e.name, e.name), pos=e.pos)
    if isinstance(e, Const):
        return e
    if isinstance(e, Paren):
        return Paren(_rename_expr(e.inner, rename), pos=e.pos)
    if isinstance(e, OpApp):
        return OpApp(e.op, [_rename_expr(a, rename) for a in e.args], pos=e.pos)
    if isinstance(e, Index):
        return Index(_rename_expr(e.base, rename),
                     _rename_expr(e.index, rename), pos=e.pos)
    if isinstance(e, Call):
        return Call(e.fname, [_rename_expr(a, rename) for a in e.args], pos=e.pos)
    raise TransformError(f"cannot rename expression {e!r}")

# ---------------------------------------------------------------------------
# single-loop normal form

_HALVE_UNROLL = 32


@dataclass
class SimpleForm:
    """Normalized program: declarations, one loop over size(y), a return."""

    program: Program
    bound_var: str
    counter: str
    symbolic_bound: str
    block_count: int
    mode: str = "extended"


def simple_form_shape_ok(sf):
    """Shape check: leading declarations, then exactly one loop
    for(i<size(y)) whose body is loop-free and call-free, then the return."""
    prog = sf.program
    if not prog.params or prog.params[-1] != (IINT, sf.bound_var):
        return False
    body = list(prog.body)
    while body and isinstance(body[0], Decl):
        body.pop(0)
    if len(body) != 1 or not isinstance(body[0], For):
        return False
    loop = body[0]
    if loop.bound != OpApp("size", [Var(sf.bound_var)]):
        return False
    exprs = [prog.ret_expr]
    for s in walk_stmts([loop.body]):
        if isinstance(s, (For, FunDef, CallStmt)):
            return False
        exprs.extend(stmt_exprs(s))
    return not any(isinstance(sub, Call) for e in exprs for sub in walk_exprs(e))


def normalize_simple(prog, mode="core"):
    """Flatten a program into the single-loop normal form with one extra
    iterable input supplying the step budget.

    All locals are hoisted ahead of the loop (iterable ones demoted to int,
    which is what makes the one-shot assignments inside the loop typable),
    control flow becomes a program-counter dispatch, and size() occurrences
    are computed by repeated halving spread over budget iterations.
    """
    del mode
    if any(isinstance(s, FunDef) for s in walk_stmts(prog.body)):
        prog = inline_functions(prog)
    return _Normalizer(prog).build()


def _expr_has_size(e):
    return any(isinstance(x, OpApp) and x.op == "size" for x in walk_exprs(e))


def _stmt_is_flat(s):
    """True when the subtree can run inside a single machine step."""
    for x in walk_stmts([s]):
        if isinstance(x, (For, Break, Continue, FunDef, CallStmt)):
            return False
        for e in stmt_exprs(x):
            if _expr_has_size(e):
                return False
    return True


class _Label:
    __slots__ = ("idx",)

    def __init__(self):
        self.idx = None


class _Normalizer:
    def __init__(self, prog):
        self.prog = prog
        self.taken = set(program_names(prog))
        self.decls = []  # hoisted (Type, machine-name) pairs
        self.blocks = []  # lists of statements / jump thunks
        self.cur = None
        self.loop_stack = []  # (incr_label, after_label)
        self.y = self.fresh("y")
        self.i = self.fresh("i")
        self.pc = self.fresh("pc")

    def fresh(self, base):
        name = fresh_name(base, self.taken)
        self.taken.add(name)
        return name

    # -- block plumbing -----------------------------------------------------

    def new_label(self):
        return _Label()

    def place(self, label):
        label.idx = len(self.blocks)
        self.blocks.append([])
        self.cur = self.blocks[-1]

    def emit(self, stmt):
        if self.cur is None:  # unreachable code after break/continue
            self.place(_Label())
        self.cur.append(stmt)

    def jump(self, label):
        self.emit(("jump", label))
        self.cur = None

    def branch(self, cond, if_true, if_false):
        self.emit(("branch", cond, if_true, if_false))
        self.cur = None

    # -- top level ----------------------------------------------------------

    def build(self):
        prog = self.prog
        scope = {n: n for _, n in prog.params}
        self.place(_Label())
        self.compile_seq(prog.body, scope)
        ret = self.rewrite_expr(prog.ret_expr, scope)
        done = self.new_label()
        if self.cur is not None:
            self.jump(done)
        done.idx = len(self.blocks)

        self.decls.append((INT, self.pc))
        body = [Decl(t, n) for t, n in self.decls]
        loop_body = []
        for k, blk in enumerate(self.blocks):
            stmts = [self.materialize(x) for x in blk]
            loop_body.append(If(OpApp("==", [Var(self.pc), _num(k)]),
                                Block(stmts), Block([])))
        loop_body.append(If(OpApp("==", [Var(self.pc), _num(done.idx)]),
                            Break(), Block([])))
        body.append(For(self.i, OpApp("size", [Var(self.y)]),
                        Block(loop_body)))
        params = list(prog.params) + [(IINT, self.y)]
        m = sum(1 for _ in walk_stmts(prog.body)) + 1
        return SimpleForm(
            program=Program(params, body, ret),
            bound_var=self.y,
            counter=self.i,
            symbolic_bound=f"O(n^({m}^{m}))",
            block_count=len(self.blocks),
        )

    def materialize(self, item):
        if isinstance(item, tuple) and item[0] == "jump":
            return Assign(Var(self.pc), _num(item[1].idx))
        if isinstance(item, tuple) and item[0] == "branch":
            _, cond, lt, lf = item
            return If(cond,
                      Block([Assign(Var(self.pc), _num(lt.idx))]),
                      Block([Assign(Var(self.pc), _num(lf.idx))]))
        return item

    # -- statements ---------------------------------------------------------

    def compile_seq(self, stmts, scope):
        for s in stmts:
            self.compile_stmt(s, scope)

    def compile_stmt(self, s, scope):
        if isinstance(s, (Decl, Assign)) or (_stmt_is_flat(s)
                                             and isinstance(s, (Block, If))):
            self.emit_flat(s, scope)
            return
        if isinstance(s, Block):
            self.compile_seq(s.stmts, dict(scope))
            return
        if isinstance(s, If):
            cond = self.rewrite_expr(s.cond, scope)
            then_l = self.new_label()
            else_l = self.new_label()
            join_l = self.new_label()
            self.branch(cond, then_l, else_l)
            self.place(then_l)
            self.compile_stmt(s.then, dict(scope))
            if self.cur is not None:
                self.jump(join_l)
            self.place(else_l)
            self.compile_stmt(s.els, dict(scope))
            if self.cur is not None:
                self.jump(join_l)
            self.place(join_l)
            return
        if isinstance(s, For):
            self.compile_loop(s, scope)
            return
        if isinstance(s, Break):
            self.jump(self.loop_stack[-1][1])
            return
        if isinstance(s, Continue):
            self.jump(self.loop_stack[-1][0])
            return
        raise TransformError(
            f"normalizer cannot handle {type(s).__name__}",
            getattr(s, "pos", None))

    def compile_loop(self, s, scope):
        if isinstance(s.bound, OpApp) and s.bound.op == "size":
            bound_expr = self.size_value(s.bound.args[0], scope)
        else:
            bound_expr = s.bound  # literal bound
        counter = self.fresh(s.counter)
        body_scope = dict(scope)
        body_scope[s.counter] = counter
        self.decls.append((INT, counter))
        self.emit(Assign(Var(counter), Const("0")))
        head = self.new_label()
        body_l = self.new_label()
        incr = self.new_label()
        after = self.new_label()
        self.jump(head)
        self.place(head)
        self.branch(OpApp("<", [Var(counter), bound_expr]), body_l, after)
        self.place(body_l)
        self.loop_stack.append((incr, after))
        self.compile_stmt(s.body, body_scope)
        self.loop_stack.pop()
        if self.cur is not None:
            self.jump(incr)
        self.place(incr)
        self.emit(Assign(Var(counter), OpApp("+", [Var(counter), Const("1")])))
        self.jump(head)
        self.place(after)

    def emit_flat(self, s, scope):
        """Declarations, assignments and size/loop-free if trees."""
        if isinstance(s, Decl):
            t = INT if s.annot is IINT else s.annot
            if not (is_int_type(t) or t is BOOL):
                raise TransformError(
                    f"normalizer supports integer and boolean locals, not {t}",
                    s.pos)
            name = self.fresh(s.name)
            scope[s.name] = name
            self.decls.append((t, name))
            self.emit(Assign(Var(name),
                             Const("false") if t is BOOL else Const("0")))
            return
        if isinstance(s, Assign):
            if not isinstance(s.lvalue, Var):
                raise TransformError(
                    "normalizer supports scalar assignments only", s.pos)
            rhs = self.rewrite_expr(s.expr, scope)
            self.emit(Assign(Var(scope[s.lvalue.name]), rhs))
            return
        if isinstance(s, Block):
            child = dict(scope)
            for inner in s.stmts:
                self.emit_flat(inner, child)
            return
        if isinstance(s, If):
            self.emit(self.flat_if(s, scope))
            return
        raise TransformError(
            f"normalizer cannot handle {type(s).__name__}",
            getattr(s, "pos", None))

    def flat_if(self, s, scope):
        """Rename a loop-free, size-free statement tree without splitting."""
        if isinstance(s, If):
            return If(self.rewrite_expr(s.cond, scope),
                      self.flat_if(s.then, dict(scope)),
                      self.flat_if(s.els, dict(scope)))
        if isinstance(s, Block):
            child = dict(scope)
            return Block([self.flat_if(x, child) for x in s.stmts])
        if isinstance(s, Assign):
            return Assign(Var(scope[s.lvalue.name]),
                          self.rewrite_expr(s.expr, scope))
        if isinstance(s, Decl):
            t = INT if s.annot is IINT else s.annot
            name = self.fresh(s.name)
            scope[s.name] = name
            self.decls.append((t, name))
            return Assign(Var(name),
                          Const("false") if t is BOOL else Const("0"))
        raise TransformError(
            f"normalizer cannot handle {type(s).__name__}",
            getattr(s, "pos", None))

    # -- expressions --------------------------------------------------------

    def rewrite_expr(self, e, scope):
        if isinstance(e, Var):
            try:
                return Var(scope[e.name])
            except KeyError:
                raise TransformError(f"unbound variable {e.name!r}",
                                     e.pos) from None
        if isinstance(e, Const):
            return e
        if isinstance(e, Paren):
            return Paren(self.rewrite_expr(e.inner, scope))
        if isinstance(e, OpApp):
            if e.op == "size":
                return self.size_value(e.args[0], scope)
            return OpApp(e.op, [self.rewrite_expr(a, scope) for a in e.args])
        raise TransformError(
            f"normalizer cannot handle expression {type(e).__name__}",
            getattr(e, "pos", None))

    def size_value(self, operand, scope):
        """Emit blocks computing the bit size of |operand| into a fresh
        variable, halving up to 32 times per budget iteration."""
        val = self.rewrite_expr(operand, scope)
        t_val = self.fresh("t")
        t_sz = self.fresh("sz")
        self.decls.append((INT, t_val))
        self.decls.append((INT, t_sz))
        self.emit(Assign(Var(t_val), val))
        self.emit(If(OpApp("<", [Var(t_val), Const("0")]),
                     Block([Assign(Var(t_val), OpApp("-", [Var(t_val)]))]),
                     Block([])))
        self.emit(Assign(Var(t_sz), Const("0")))
        halve = self.new_label()
        nxt = self.new_label()
        self.jump(halve)
        self.place(halve)
        step = If(OpApp("!=", [Var(t_val), Const("0")]),
                  Block([Assign(Var(t_val), OpApp("/", [Var(t_val), Const("2")])),
                         Assign(Var(t_sz), OpApp("+", [Var(t_sz), Const("1")]))]),
                  Block([]))
        for _ in range(_HALVE_UNROLL):
            self.emit(step)
        self.branch(OpApp("==", [Var(t_val), Const("0")]), nxt, halve)
        self.place(nxt)
        return Var(t_sz)


# ---------------------------------------------------------------------------
# stabilization and bounded equivalence


def stabilization_search(simple, prog, args, t_max=1 << 20, mode="core",
                         fuel=None):
    """Double the budget until the normalized program reproduces the
    original output and stays stable at twice the budget."""
    target = run_program(prog, list(args), mode=mode, fuel=fuel).output
    t = 1
    while t <= t_max:
        got = run_program(simple.program, list(args) + [t],
                          mode="extended", fuel=fuel).output
        if got == target:
            again = run_program(simple.program, list(args) + [2 * t],
                                mode="extended", fuel=fuel).output
            if again == target:
                return t
        t *= 2
    raise TransformError(
        f"no stabilization budget up to {t_max}: the normalized program "
        f"never reproduced output {format_value(target)}")


def bounded_equiv(p1, p2, input_bound, mode="core", fuel=None):
    """Exhaustively compare two programs on all integer inputs with
    |v_i| <= input_bound; returns (True, None) or (False, witness)."""
    import itertools

    if len(p1.params) != len(p2.params):
        raise ArgumentError("programs have different arity")
    rng = range(-input_bound, input_bound + 1)
    for tup in itertools.product(rng, repeat=len(p1.params)):
        v1 = run_program(p1, list(tup), mode=mode, fuel=fuel).output
        v2 = run_program(p2, list(tup), mode=mode, fuel=fuel).output
        if v1 != v2:
            return False, tup
    return True, None
