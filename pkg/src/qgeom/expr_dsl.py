"""A small complex-valued expression language and the family/chart file format.

Grammar::

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := '-' factor | power
    power  := atom ('^' factor)?
    atom   := NUMBER | 'i' | 'pi' | IDENT | IDENT '(' expr ')' | '(' expr ')'

``i`` is the imaginary unit and ``pi`` is pi; both are reserved, as are the
function names in :data:`FUNCTIONS`.  Identifiers are case-sensitive.

Family files are line oriented::

    # comment
    family hopf_s3
    const r = 1
    param theta in [0, pi]
    param phi in [0, 2*pi)
    state: [ r*cos(theta/2)*exp(i*(chi+phi)/2), ... ]

A ``chart <name>`` header declares a real chart map instead; its body ends
with ``map: [...]`` and may carry ``twist: [1, 1, 1, -1]``.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import (
    ExpressionSyntaxError,
    FamilyDefinitionError,
    NumericalError,
    UnboundParameterError,
    UnknownFunctionError,
)

__all__ = [
    "Number",
    "Constant",
    "Param",
    "Neg",
    "BinOp",
    "Call",
    "Expr",
    "FUNCTIONS",
    "Parameter",
    "FamilyDefinition",
    "parse_expression",
    "eval_expression",
    "canonical_print",
    "free_symbols",
    "parse_family_file",
    "load_family_file",
]


# -- AST -------------------------------------------------------------------

@dataclass(frozen=True)
class Number:
    value: float


@dataclass(frozen=True)
class Constant:
    name: str  # "i" or "pi"


@dataclass(frozen=True)
class Param:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"


Expr = Union[Number, Constant, Param, Neg, BinOp, Call]


def _re(z):
    return np.real(z) + 0j


def _im(z):
    return np.imag(z) + 0j


def _abs(z):
    return np.abs(z) + 0j


FUNCTIONS = {
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
    "conj": np.conj,
    "re": _re,
    "im": _im,
    "abs": _abs,
}

RESERVED = frozenset(FUNCTIONS) | {"i", "pi"}


# -- tokenizer ---------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^(),\[\]])
    """,
    re.VERBOSE,
)

_ATOM_START = frozenset({"NUMBER", "IDENT", "'i'", "'pi'", "'('", "'-'"})
_AFTER_OPERAND = frozenset({"'+'", "'-'", "'*'", "'/'", "'^'"})


@dataclass
class _Token:
    kind: str  # number | ident | op | eof
    text: str
    offset: int  # byte offset


def _tokenize(src, base=0):
    tokens = []
    pos = 0
    byte_pos = base
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if m is None:
            raise ExpressionSyntaxError(f"unexpected character {src[pos]!r}", byte_pos, _ATOM_START)
        text = m.group()
        if m.lastgroup != "ws":
            tokens.append(_Token(m.lastgroup, text, byte_pos))
        byte_pos += len(text.encode("utf-8"))
        pos = m.end()
    tokens.append(_Token("eof", "", byte_pos))
    return tokens


class _Parser:
    def __init__(self, src, base=0):
        self.tokens = _tokenize(src, base)
        self.pos = 0

    @property
    def tok(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def at_op(self, *ops):
        return self.tok.kind == "op" and self.tok.text in ops

    def expect_op(self, op, message, extra=()):
        if not self.at_op(op):
            raise ExpressionSyntaxError(message, self.tok.offset, {f"'{op}'", *extra})
        return self.advance()

    def expr(self):
        node = self.term()
        while self.at_op("+", "-"):
            op = self.advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.at_op("*", "/"):
            op = self.advance().text
            node = BinOp(op, node, self.factor())
        return node

    def factor(self):
        if self.at_op("-"):
            self.advance()
            return Neg(self.factor())
        return self.power()

    def power(self):
        base = self.atom()
        if self.at_op("^"):
            self.advance()
            return BinOp("^", base, self.factor())
        return base

    def atom(self):
        tok = self.tok
        if tok.kind == "number":
            self.advance()
            value = float(tok.text)
            if not math.isfinite(value):
                raise ExpressionSyntaxError(f"literal {tok.text} overflows", tok.offset)
            return Number(value)
        if tok.kind == "ident":
            self.advance()
            name = tok.text
            if self.at_op("("):
                if name not in FUNCTIONS:
                    raise UnknownFunctionError(
                        f"unknown function {name!r}", tok.offset, {repr(f) for f in FUNCTIONS}
                    )
                self.advance()
                arg = self.expr()
                self.expect_op(")", "unbalanced parentheses: missing ')'", _AFTER_OPERAND)
                return Call(name, arg)
            if name in ("i", "pi"):
                return Constant(name)
            if name in FUNCTIONS:
                raise ExpressionSyntaxError(f"function {name!r} needs an argument", self.tok.offset, {"'('"})
            return Param(name)
        if self.at_op("("):
            self.advance()
            node = self.expr()
            self.expect_op(")", "unbalanced parentheses: missing ')'", _AFTER_OPERAND)
            return node
        what = "end of input" if tok.kind == "eof" else repr(tok.text)
        raise ExpressionSyntaxError(f"unexpected {what}", tok.offset, _ATOM_START)

    def finish(self):
        tok = self.tok
        if tok.kind != "eof":
            if self.at_op(")"):
                raise ExpressionSyntaxError("unbalanced parentheses: stray ')'", tok.offset, _AFTER_OPERAND | {"end of input"})
            raise ExpressionSyntaxError(f"unexpected {tok.text!r}", tok.offset, _AFTER_OPERAND | {"end of input"})


def parse_expression(src: str) -> Expr:
    """Parse expression text into an AST.

    Raises :class:`ExpressionSyntaxError` (with byte offset and expected
    tokens) or :class:`UnknownFunctionError`.
    """
    parser = _Parser(src)
    node = parser.expr()
    parser.finish()
    return node


def _parse_list(src, base=0):
    """Parse ``[e1, e2, ...]`` followed by end of input."""
    parser = _Parser(src, base)
    parser.expect_op("[", "expected list")
    if parser.at_op("]"):
        parser.advance()
        parser.finish()
        return []
    items = [parser.expr()]
    while parser.at_op(","):
        parser.advance()
        items.append(parser.expr())
    parser.expect_op("]", "unterminated list", {"','"} | _AFTER_OPERAND)
    parser.finish()
    return items


# -- printing ----------------------------------------------------------------

def canonical_print(ast: Expr) -> str:
    """Fully parenthesised text; ``parse_expression`` maps it back to ``ast``."""
    if isinstance(ast, Number):
        return repr(float(ast.value))
    if isinstance(ast, Constant):
        return ast.name
    if isinstance(ast, Param):
        return ast.name
    if isinstance(ast, Neg):
        return f"(-{canonical_print(ast.operand)})"
    if isinstance(ast, BinOp):
        return f"({canonical_print(ast.left)} {ast.op} {canonical_print(ast.right)})"
    if isinstance(ast, Call):
        return f"{ast.func}({canonical_print(ast.arg)})"
    raise TypeError(f"not an expression node: {ast!r}")


def free_symbols(ast: Expr) -> list[str]:
    """Parameter names in order of first appearance."""
    seen = []

    def walk(node):
        if isinstance(node, Param):
            if node.name not in seen:
                seen.append(node.name)
        elif isinstance(node, Neg):
            walk(node.operand)
        elif isinstance(node, BinOp):
            walk(node.left)
            walk(node.right)
        elif isinstance(node, Call):
            walk(node.arg)

    walk(ast)
    return seen


# -- evaluation --------------------------------------------------------------

def _checked(value, what):
    if not np.all(np.isfinite(value)):
        raise NumericalError(f"non-finite value in {what}")
    return value


def _eval(node, bindings):
    if isinstance(node, Number):
        return complex(node.value)
    if isinstance(node, Constant):
        return 1j if node.name == "i" else complex(math.pi)
    if isinstance(node, Param):
        try:
            return bindings[node.name]
        except KeyError:
            raise UnboundParameterError(f"unbound parameter {node.name!r}") from None
    if isinstance(node, Neg):
        # 0 - z keeps +0 imaginary parts, so sqrt(-4) stays on the principal side
        return 0j - _eval(node.operand, bindings)
    if isinstance(node, Call):
        arg = _eval(node.arg, bindings)
        if node.func == "log" and np.any(arg == 0):
            raise NumericalError("log(0)")
        with np.errstate(all="ignore"):
            return _checked(FUNCTIONS[node.func](arg), f"{node.func}()")
    left = _eval(node.left, bindings)
    right = _eval(node.right, bindings)
    op = node.op
    if op == "+":
        return left + right
    if op == "-":
        return left - right
    if op == "*":
        return _checked(left * right, "product")
    if op == "/":
        if np.any(right == 0):
            raise NumericalError("division by zero")
        return _checked(left / right, "quotient")
    with np.errstate(all="ignore"):
        return _checked(np.power(left, right), "power")


def eval_expression(ast: Expr, bindings=None):
    """Evaluate with principal branches.

    ``bindings`` maps parameter names to complex numbers or to numpy
    arrays (then evaluation is elementwise).  Scalars give ``complex``.
    """
    bindings = {} if bindings is None else bindings
    out = _checked(_eval(ast, bindings), "expression")
    if np.ndim(out) == 0:
        return complex(out)
    return np.asarray(out, dtype=complex)


# -- family / chart files ----------------------------------------------------

@dataclass(frozen=True)
class Parameter:
    name: str
    lower: float
    upper: float
    upper_closed: bool = True

    def contains(self, x):
        if self.upper_closed:
            return self.lower <= x <= self.upper
        return self.lower <= x < self.upper


@dataclass(frozen=True)
class FamilyDefinition:
    name: str
    parameters: tuple
    components: tuple
    constants: dict = field(default_factory=dict)
    kind: str = "family"  # or "chart"
    twist: tuple | None = None

    @property
    def parameter_names(self):
        return tuple(p.name for p in self.parameters)


_HEADER = re.compile(r"(family|chart)\s+([A-Za-z_][A-Za-z0-9_]*)\s*$")
_PARAM = re.compile(r"param\s+([A-Za-z_][A-Za-z0-9_]*)\s+in\s+\[(.*),(.*)([\])])\s*$")
_CONST = re.compile(r"const\s+([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(.+)$")
_BODY = re.compile(r"(state|map|twist)\s*:")


def _fail(lineno, message):
    raise FamilyDefinitionError(f"line {lineno}: {message}")


def _const_value(text, lineno, known):
    try:
        ast = parse_expression(text)
        value = eval_expression(ast, {k: complex(v) for k, v in known.items()})
    except (ExpressionSyntaxError, UnboundParameterError, NumericalError) as exc:
        _fail(lineno, f"bad numeric value {text.strip()!r}: {exc}")
    if value.imag != 0:
        _fail(lineno, f"value {text.strip()!r} is not real")
    return value.real


def _check_name(name, lineno, taken):
    if name in RESERVED:
        _fail(lineno, f"{name!r} is reserved")
    if name in taken:
        _fail(lineno, f"duplicate name {name!r}")


def parse_family_file(src: str) -> FamilyDefinition:
    """Parse and validate a family (or chart) definition file."""
    name, kind = "unnamed", "family"
    params, consts = [], {}
    twist = None
    components = None
    lines = [ln.split("#", 1)[0] for ln in src.splitlines()]
    k = 0
    while k < len(lines):
        lineno, line = k + 1, lines[k].strip()
        k += 1
        if not line:
            continue
        if m := _HEADER.match(line):
            if params or consts or components is not None:
                _fail(lineno, "header must come first")
            kind, name = m.group(1), m.group(2)
        elif m := _PARAM.match(line):
            pname = m.group(1)
            _check_name(pname, lineno, {p.name for p in params} | set(consts))
            lo = _const_value(m.group(2), lineno, consts)
            hi = _const_value(m.group(3), lineno, consts)
            if not (math.isfinite(lo) and math.isfinite(hi)):
                _fail(lineno, f"bounds of {pname!r} must be finite")
            if not lo < hi:
                _fail(lineno, f"bound violation for {pname!r}: lower {lo!r} >= upper {hi!r}")
            params.append(Parameter(pname, lo, hi, m.group(4) == "]"))
        elif m := _CONST.match(line):
            cname = m.group(1)
            _check_name(cname, lineno, {p.name for p in params} | set(consts))
            consts[cname] = _const_value(m.group(2), lineno, consts)
        elif m := _BODY.match(line):
            label = m.group(1)
            rest = line[m.end():]
            # a list may span lines; gather until brackets balance
            while rest.count("[") > rest.count("]") and k < len(lines):
                rest += " " + lines[k]
                k += 1
            try:
                items = _parse_list(rest.strip())
            except ExpressionSyntaxError as exc:
                _fail(lineno, f"in {label} list: {exc}")
            if label == "twist":
                if kind != "chart":
                    _fail(lineno, "twist is only allowed in chart files")
                signs = []
                for item in items:
                    v = _const_value(canonical_print(item), lineno, {})
                    if v not in (1.0, -1.0):
                        _fail(lineno, f"twist entries must be +1 or -1, got {v!r}")
                    signs.append(int(v))
                twist = tuple(signs)
                continue
            expected = "state" if kind == "family" else "map"
            if label != expected:
                _fail(lineno, f"{kind} files end with '{expected}:', not '{label}:'")
            components = tuple(items)
            if any(ln.strip() for ln in lines[k:]):
                _fail(k + 1, f"content after the {label} list")
            break
        else:
            _fail(lineno, f"cannot parse {line!r}")

    if components is None:
        _fail(len(lines), "missing state list")
    if not components:
        _fail(len(lines), "empty component list")

    symbols = []
    for comp in components:
        for s in free_symbols(comp):
            if s not in symbols:
                symbols.append(s)
    if params:
        declared = {p.name for p in params} | set(consts)
        for s in symbols:
            if s not in declared:
                raise FamilyDefinitionError(f"undeclared symbol {s!r} in component list")
    else:
        # minimal files: every free symbol that is not a constant becomes an
        # unbounded parameter
        free = [s for s in symbols if s not in consts]
        if not free:
            raise FamilyDefinitionError("a family needs at least one parameter")
        params = [Parameter(s, -math.inf, math.inf) for s in free]

    if twist is not None and len(twist) != len(components):
        raise FamilyDefinitionError(
            f"twist has {len(twist)} entries but the map has {len(components)} components"
        )
    return FamilyDefinition(name, tuple(params), components, dict(consts), kind, twist)


def load_family_file(path) -> FamilyDefinition:
    with open(path, encoding="utf-8") as fh:
        return parse_family_file(fh.read())
