"""Runtime values and the size measure.

Integers are Python ints (unbounded), booleans are Python bools, strings are
Python str.  Arrays are mutable reference values; closures capture the store
at definition time.
"""

from .ast import ArrayT, Arrow, BOOL, is_int_type, is_string_type


class VArray:
    """Mutable array value; aliasing on assignment and call is intentional."""

    __slots__ = ("items", "elem")

    def __init__(self, items, elem):
        self.items = items
        self.elem = elem

    def __repr__(self):
        return f"VArray({self.items!r})"

    def __eq__(self, other):
        return isinstance(other, VArray) and self.items == other.items


class Closure:
    __slots__ = ("def_store", "params", "body", "ret_expr", "name")

    def __init__(self, def_store, params, body, ret_expr, name):
        self.def_store = def_store
        self.params = params
        self.body = body
        self.ret_expr = ret_expr
        self.name = name

    def __repr__(self):
        return f"<closure {self.name}>"


class Builtin:
    __slots__ = ("name",)

    def __init__(self, name):
        self.name = name

    def __repr__(self):
        return f"<builtin {self.name}>"


def default_value(annot):
    """Initial value for a declared variable of the given type."""
    if is_int_type(annot):
        return 0
    if annot is BOOL:
        return False
    if is_string_type(annot):
        return ""
    if isinstance(annot, ArrayT):
        return VArray([], annot.elem)
    raise ValueError(f"type {annot} has no default value")


def literal_value(text):
    if text == "true":
        return True
    if text == "false":
        return False
    if text.startswith('"'):
        return text[1:-1]
    if text.startswith("0b"):
        return int(text[2:], 2)
    return int(text)


def size_of_value(v):
    """Bit-size measure: ceil(log2(|x|+1)) on ints, 1 on booleans,
    character count on strings, max over elements on arrays."""
    if isinstance(v, bool):
        return 1
    if isinstance(v, int):
        return abs(v).bit_length()
    if isinstance(v, str):
        return len(v)
    if isinstance(v, VArray):
        if not v.items:
            return 0
        return max(size_of_value(x) for x in v.items)
    raise ValueError(f"value {v!r} has no size")


def value_consistent(v, annot):
    if is_int_type(annot):
        return isinstance(v, int) and not isinstance(v, bool)
    if annot is BOOL:
        return isinstance(v, bool)
    if is_string_type(annot):
        return isinstance(v, str)
    if isinstance(annot, ArrayT):
        return isinstance(v, VArray) and all(
            value_consistent(x, annot.elem) for x in v.items)
    if isinstance(annot, Arrow):
        return isinstance(v, (Closure, Builtin))
    return False


def format_value(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, str):
        return f'"{v}"'
    if isinstance(v, VArray):
        return "[" + ",".join(format_value(x) for x in v.items) + "]"
    return repr(v)
