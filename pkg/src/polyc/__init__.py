"""PolyC toolchain: parser, termination-guarantee type checker, cost-counting
interpreter, Turing machine compiler, instrumentation transforms and the
iterable-inference polynomial-time analyzer."""

from .lexer import tokenize
from .parser import parse_program, parse_source, detect_mode
from .desugar import desugar
from .printer import pretty_print
from .typecheck import (
    check_program, check_expr, check_stmt, const_type, sup_type, type_equiv,
    asg_predicate, op_signature, TypingEnv, Diag,
)
from .interp import (
    run_program, eval_expr, exec_stmt, apply_op, CostReport, Interp,
)
from .values import (
    VArray, Closure, default_value, literal_value, size_of_value, format_value,
)

__version__ = "0.1.0"

__all__ = [
    "tokenize", "parse_program", "parse_source", "detect_mode", "desugar",
    "pretty_print", "check_program", "check_expr", "check_stmt", "const_type",
    "sup_type", "type_equiv", "asg_predicate", "op_signature", "TypingEnv",
    "Diag", "run_program", "eval_expr", "exec_stmt", "apply_op", "CostReport",
    "Interp", "VArray", "Closure", "default_value", "literal_value",
    "size_of_value", "format_value", "__version__",
]


def load_program(source, mode=None):
    """Parse and desugar source text; returns (program, mode)."""
    from .parser import detect_mode as _detect

    if mode is None:
        mode = _detect(source)
    prog = parse_source(source, mode)
    return desugar(prog), mode
