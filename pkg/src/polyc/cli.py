"""Command line front end.

Exit codes: 0 success, 1 type error, 2 runtime error, 3 usage error.
POLYC_FUEL caps interpreter steps (absent = unlimited).
"""

import argparse
import json
import os
import sys

from .analysis import IllTypedError, poly_check
from .desugar import desugar
from .errors import ArgumentError, LexError, ParseError, DesugarError, \
    PolyRuntimeError, PolycError
from .interp import run_program
from .parser import detect_mode, parse_source
from .printer import pretty_print
from .tm import TmError, clock_program, compile_tm, parse_tm
from .transform import (
    TransformError, bounded_equiv, normalize_simple, simple_form_shape_ok,
    stabilization_search, t1_max_tracker, t2_cost_tracker,
)
from .typecheck import check_program
from .values import VArray, format_value, literal_value
from .ast import ArrayT, BOOL, is_int_type, is_string_type

EXIT_OK = 0
EXIT_TYPE = 1
EXIT_RUNTIME = 2
EXIT_USAGE = 3


class CliFailure(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code
        self.message = message


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits on its own for bad usage or --help
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE
    try:
        return args.handler(args)
    except CliFailure as e:
        print(e.message, file=sys.stderr)
        return e.code
    except (LexError, ParseError, DesugarError) as e:
        print(e.render(getattr(args, "file", "<input>")), file=sys.stderr)
        return EXIT_TYPE
    except (PolyRuntimeError,) as e:
        print(e.render(getattr(args, "file", "<input>")), file=sys.stderr)
        return EXIT_RUNTIME
    except (ArgumentError, TmError, TransformError, IllTypedError) as e:
        print(f"error: {e.message}", file=sys.stderr)
        return EXIT_USAGE
    except PolycError as e:
        print(f"error: {e.message}", file=sys.stderr)
        return EXIT_RUNTIME
    except Exception as e:  # total exit-code contract for scripted use
        print(f"internal error: {e}", file=sys.stderr)
        return EXIT_RUNTIME


def build_parser():
    p = argparse.ArgumentParser(
        prog="polyc",
        description="Toolchain for a typed imperative language whose "
                    "well-typed programs terminate in polynomial time.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, handler, **kw):
        sp = sub.add_parser(name, **kw)
        sp.set_defaults(handler=handler)
        return sp

    sp = add("run", cmd_run, help="type-check and run a program")
    sp.add_argument("file")
    sp.add_argument("args", nargs="*", help="program arguments")
    sp.add_argument("--mode", choices=["core", "extended"])
    sp.add_argument("--cost", action="store_true", help="print the cost report")
    sp.add_argument("--json", action="store_true")

    sp = add("check", cmd_check, help="type-check a program")
    sp.add_argument("file")
    sp.add_argument("--mode", choices=["core", "extended"])
    sp.add_argument("--json", action="store_true")

    sp = add("cost", cmd_cost, help="run with cost accounting")
    sp.add_argument("file")
    sp.add_argument("args", nargs="*")
    sp.add_argument("--mode", choices=["core", "extended"])
    sp.add_argument("--json", action="store_true")

    sp = add("clock", cmd_clock, help="emit the degree-d clock program")
    sp.add_argument("degree", type=int)

    sp = add("compile-tm", cmd_compile_tm,
             help="compile a Turing machine spec to a core program")
    sp.add_argument("tmfile")
    sp.add_argument("--degree", type=int, default=None,
                    help="polynomial degree of the step budget (default 2)")

    sp = add("transform", cmd_transform, help="source-to-source transforms")
    sp.add_argument("kind", choices=["t1", "t2", "normalize"])
    sp.add_argument("file")
    sp.add_argument("--mode", choices=["core", "extended"])

    sp = add("analyze", cmd_analyze,
             help="infer iterable annotations; verdict poly or unknown")
    sp.add_argument("file")
    sp.add_argument("--mode", choices=["core", "extended"])

    sp = add("equiv", cmd_equiv,
             help="exhaustively compare two programs on a bounded input box")
    sp.add_argument("file1")
    sp.add_argument("file2")
    sp.add_argument("bound", type=int)
    sp.add_argument("--mode", choices=["core", "extended"])
    return p


def _fuel():
    raw = os.environ.get("POLYC_FUEL")
    if not raw:
        return None
    try:
        return int(raw)
    except ValueError:
        raise CliFailure(EXIT_USAGE, f"POLYC_FUEL must be an integer, got {raw!r}")


def _load(path, mode_flag):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            source = fh.read()
    except OSError as e:
        raise CliFailure(EXIT_USAGE, f"cannot read {path}: {e}")
    mode = mode_flag or detect_mode(source)
    prog = parse_source(source, mode)
    return desugar(prog), mode


def _checked(path, mode_flag, json_mode=False):
    prog, mode = _load(path, mode_flag)
    res = check_program(prog, mode)
    if not res.ok:
        if json_mode:
            print(json.dumps({"diagnostics": [d.to_json() for d in res.errors]}))
        for d in res.errors:
            print(d.render(path), file=sys.stderr)
        raise CliFailure(EXIT_TYPE, f"{len(res.errors)} type error(s)")
    return prog, mode


def parse_arg_literal(text, annot, mode):
    """Surface syntax of program inputs: signed decimal, 0b binary,
    true/false, [v,...] arrays, double-quoted strings."""
    text = text.strip()
    if is_int_type(annot):
        neg = text.startswith("-")
        body = text[1:] if neg else text
        try:
            v = literal_value(body) if body.startswith("0b") else int(body)
        except ValueError:
            raise ArgumentError(f"expected an integer literal, got {text!r}")
        return -v if neg else v
    if annot is BOOL:
        if text in ("true", "false"):
            return text == "true"
        raise ArgumentError(f"expected true or false, got {text!r}")
    if is_string_type(annot):
        if mode != "extended":
            raise ArgumentError("string arguments require extended mode")
        if len(text) >= 2 and text.startswith('"') and text.endswith('"'):
            return text[1:-1]
        return text  # unquoted convenience form
    if isinstance(annot, ArrayT):
        if mode != "extended":
            raise ArgumentError("array arguments require extended mode")
        if not (text.startswith("[") and text.endswith("]")):
            raise ArgumentError(f"expected a bracketed list, got {text!r}")
        inner = text[1:-1].strip()
        items = []
        if inner:
            for piece in _split_top(inner):
                items.append(parse_arg_literal(piece, annot.elem, mode))
        return VArray(items, annot.elem)
    raise ArgumentError(f"cannot build a value of type {annot}")


def _split_top(text):
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return parts


def _program_args(prog, raw_args, mode):
    if len(raw_args) != len(prog.params):
        raise CliFailure(
            EXIT_USAGE,
            f"program expects {len(prog.params)} arguments, got {len(raw_args)}")
    vals = []
    for (annot, name), raw in zip(prog.params, raw_args):
        try:
            vals.append(parse_arg_literal(raw, annot, mode))
        except ArgumentError as e:
            raise CliFailure(EXIT_USAGE, f"argument {name!r}: {e.message}")
    return vals


def cmd_run(args):
    prog, mode = _checked(args.file, args.mode, args.json)
    vals = _program_args(prog, args.args, mode)
    report = run_program(prog, vals, cost_mode=args.cost, mode=mode,
                         fuel=_fuel())
    if args.json:
        doc = report.to_json() if args.cost else {"output": format_value(
            report.output).strip('"')}
        print(json.dumps(doc))
        return EXIT_OK
    print(format_value(report.output))
    if args.cost:
        print(f"ic: {report.ic}")
        print(f"max value size: {report.max_value_size}")
    return EXIT_OK


def cmd_cost(args):
    args.cost = True
    return cmd_run(args)


def cmd_check(args):
    prog, mode = _checked(args.file, args.mode, args.json)
    del prog, mode
    if args.json:
        print(json.dumps({"diagnostics": []}))
    else:
        print("well-typed: int")
    return EXIT_OK


def cmd_clock(args):
    if args.degree < 1:
        raise CliFailure(EXIT_USAGE, "degree must be at least 1")
    print(pretty_print(clock_program(args.degree)), end="")
    return EXIT_OK


def cmd_compile_tm(args):
    with open(args.tmfile, "r", encoding="utf-8") as fh:
        machine = parse_tm(fh.read(), name=args.tmfile)
    degree = args.degree
    if degree is None:
        degree = 2
        print("note: no --degree given; defaulting to 2. A degree below the "
              "machine's polynomial running time truncates the simulation.",
              file=sys.stderr)
    prog = compile_tm(machine, degree)
    print(pretty_print(prog), end="")
    return EXIT_OK


def cmd_transform(args):
    prog, mode = _checked(args.file, args.mode)
    if args.kind == "t1":
        print(pretty_print(t1_max_tracker(prog)), end="")
    elif args.kind == "t2":
        print(pretty_print(t2_cost_tracker(prog)), end="")
    else:
        sf = normalize_simple(prog, mode)
        if not simple_form_shape_ok(sf):
            raise CliFailure(EXIT_RUNTIME, "normalizer produced a bad shape")
        print(f"// budget variable: {sf.bound_var}; "
              f"bound {sf.symbolic_bound}", file=sys.stderr)
        print(pretty_print(sf.program, mode_marker="extended"), end="")
    return EXIT_OK


def cmd_analyze(args):
    prog, mode = _load(args.file, args.mode)
    verdict = poly_check(prog, mode)
    print(verdict.verdict)
    if verdict.verdict == "poly":
        print(pretty_print(verdict.witness), end="")
    return EXIT_OK


def cmd_equiv(args):
    p1, mode1 = _checked(args.file1, args.mode)
    p2, mode2 = _checked(args.file2, args.mode)
    if args.bound < 0:
        raise CliFailure(EXIT_USAGE, "bound must be non-negative")
    same, witness = bounded_equiv(p1, p2, args.bound, mode=mode1, fuel=_fuel())
    del mode2
    if same:
        print("true")
    else:
        print("false")
        print("witness: " + " ".join(str(v) for v in witness))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
