"""Problem-description files.

A problem file is a list of ``key = value`` lines; ``#`` starts a comment.

    k = 1
    p = 2
    m1 = gevrey(1)
    m2 = gevrey(1)
    a = 1
    phi_0 = 1/(1-z)
    f = 0
    nt = 40          # options may follow the problem keys

Expressions are rational functions over Q with ``+ - * / ^`` and
parentheses, in ``z`` (and ``t`` for ``f``). Option values may use ``pi``.
Moment specs are ``gevrey(a)``, ``qfact(q)`` and ``product(m, m)``.
Every failure is a :class:`ParseError` carrying line and column.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from .errors import MathDomainError, MomentSumError, NonInvertibleError
from .sequences import MomentSequence, gevrey_moments, product_moments, q_factorial_moments
from .series import (
    TruncatedSeries1D,
    TruncatedSeries2D,
    constant_2d,
    mul_2d,
    reciprocal_2d,
    t_variable,
    zeros,
)
from .solver import CauchyProblem, z_budget

PROBLEM_KEYS = ("k", "p", "m1", "m2", "s1", "s2", "a", "f", "r")
OPTION_KEYS = ("nt", "nz", "rprime", "alpha", "direction", "z0", "tgrid", "Q")
DEFAULT_OPTIONS = {"nt": 40, "nz": 40, "rprime": Fraction(1, 4)}


class ParseError(MomentSumError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.line, self.col, self.detail = line, col, message
        super().__init__(f"line {line}, column {col}: {message}")


# ---------------------------------------------------------------------------
# Expression AST
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: int


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple


Expr = Union[Num, Var, Neg, BinOp, Pow, Call]

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def to_text(e: Expr) -> str:
    """Shortest parenthesization that parses back to the same tree."""
    if isinstance(e, Num):
        v = e.value
        return str(v.numerator) if v.denominator == 1 else f"({v.numerator}/{v.denominator})"
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Call):
        return f"{e.name}({', '.join(to_text(a) for a in e.args)})"
    if isinstance(e, Neg):
        inner = to_text(e.arg)
        return f"-({inner})" if isinstance(e.arg, (BinOp, Neg)) else f"-{inner}"
    if isinstance(e, Pow):
        base = to_text(e.base)
        if not isinstance(e.base, (Var, Call)) and not (
            isinstance(e.base, Num) and e.base.value.denominator == 1 and e.base.value >= 0
        ):
            base = f"({base})"
        ex = str(e.exponent) if e.exponent >= 0 else f"({e.exponent})"
        return f"{base}^{ex}"
    prec = _PREC[e.op]
    left = to_text(e.left)
    if isinstance(e.left, BinOp) and _PREC[e.left.op] < prec:
        left = f"({left})"
    right = to_text(e.right)
    # left associativity: equal precedence on the right needs parentheses
    if isinstance(e.right, BinOp) and _PREC[e.right.op] <= prec:
        right = f"({right})"
    if isinstance(e.right, Neg):
        right = f"({right})"
    return f"{left} {e.op} {right}"


# ---------------------------------------------------------------------------
# Tokenizer and recursive-descent parser
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+(?:\.\d+)?)|([A-Za-z_][A-Za-z_0-9]*)|(.))")


@dataclass
class _Tok:
    kind: str
    text: str
    col: int


def _tokenize(text: str, line: int, col0: int) -> list:
    toks, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        if m.group(1):
            toks.append(_Tok("num", m.group(1), col0 + m.start(1)))
        elif m.group(2):
            toks.append(_Tok("id", m.group(2), col0 + m.start(2)))
        elif m.group(3):
            ch = m.group(3)
            if ch not in "+-*/^(),":
                raise ParseError(f"unexpected character {ch!r}", line, col0 + m.start(3))
            toks.append(_Tok("op", ch, col0 + m.start(3)))
        pos = m.end()
    toks.append(_Tok("end", "", col0 + len(text.rstrip())))
    return toks


class _Parser:
    def __init__(self, text: str, line: int, col0: int):
        self.toks = _tokenize(text, line, col0)
        self.i = 0
        self.line = line

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        return ParseError(msg, self.line, tok.col + 1)

    def expect(self, text):
        tok = self.take()
        if tok.text != text:
            raise self.error(f"expected {text!r}, found {tok.text or 'end of line'!r}", tok)
        return tok

    def parse(self) -> Expr:
        e = self.expr()
        if self.peek().kind != "end":
            raise self.error(f"unexpected {self.peek().text!r}")
        return e

    def expr(self) -> Expr:
        e = self.term()
        while self.peek().text in ("+", "-"):
            op = self.take().text
            e = BinOp(op, e, self.term())
        return e

    def term(self) -> Expr:
        e = self.unary()
        while self.peek().text in ("*", "/"):
            op = self.take().text
            e = BinOp(op, e, self.unary())
        return e

    def unary(self) -> Expr:
        if self.peek().text == "-":
            self.take()
            return Neg(self.unary())
        if self.peek().text == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.peek().text == "^":
            tok = self.take()
            ex = self.unary()
            value = _constant_value(ex)
            if value is None or value.denominator != 1:
                raise self.error("exponent must be an integer constant", tok)
            return Pow(base, int(value))
        return base

    def atom(self) -> Expr:
        tok = self.take()
        if tok.kind == "num":
            return Num(Fraction(tok.text))
        if tok.kind == "id":
            if self.peek().text == "(":
                self.take()
                args = [self.expr()]
                while self.peek().text == ",":
                    self.take()
                    args.append(self.expr())
                self.expect(")")
                return Call(tok.text, tuple(args))
            return Var(tok.text)
        if tok.text == "(":
            e = self.expr()
            self.expect(")")
            return e
        raise self.error(f"unexpected {tok.text or 'end of line'!r}", tok)


def _constant_value(e: Expr) -> Optional[Fraction]:
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Neg):
        v = _constant_value(e.arg)
        return None if v is None else -v
    if isinstance(e, BinOp):
        a, b = _constant_value(e.left), _constant_value(e.right)
        if a is None or b is None:
            return None
        if e.op == "/" and b == 0:
            return None
        return {"+": a + b, "-": a - b, "*": a * b, "/": a / b if b else None}[e.op]
    if isinstance(e, Pow):
        v = _constant_value(e.base)
        if v is None or (v == 0 and e.exponent < 0):
            return None
        return v ** e.exponent
    return None


def parse_expression(text: str, line: int = 1, col0: int = 0) -> Expr:
    return _Parser(text, line, col0).parse()


def _variables(e: Expr) -> set:
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, Neg):
        return _variables(e.arg)
    if isinstance(e, BinOp):
        return _variables(e.left) | _variables(e.right)
    if isinstance(e, Pow):
        return _variables(e.base)
    if isinstance(e, Call):
        return set().union(*(_variables(a) for a in e.args))
    return set()


def _real_value(e: Expr) -> float:
    """Numeric value of an option expression; ``pi`` is allowed."""
    if isinstance(e, Num):
        return float(e.value)
    if isinstance(e, Var):
        if e.name == "pi":
            return math.pi
        raise ValueError(f"unknown symbol {e.name!r}")
    if isinstance(e, Neg):
        return -_real_value(e.arg)
    if isinstance(e, Pow):
        return _real_value(e.base) ** e.exponent
    if isinstance(e, BinOp):
        a, b = _real_value(e.left), _real_value(e.right)
        return {"+": a + b, "-": a - b, "*": a * b, "/": a / b}[e.op]
    raise ValueError("calls are not allowed here")


# ---------------------------------------------------------------------------
# Expansion to truncated series
# ---------------------------------------------------------------------------


def expand(e: Expr, nt: int, nz: int) -> TruncatedSeries2D:
    """Exact Taylor expansion of a rational expression in ``(t, z)``."""
    if isinstance(e, Num):
        return constant_2d(e.value, nt, nz)
    if isinstance(e, Var):
        if e.name == "t":
            return t_variable(nt, nz)
        if e.name == "z":
            rows = [zeros(nz) for _ in range(nt + 1)]
            if nz >= 1:
                rows[0] = TruncatedSeries1D((Fraction(0), Fraction(1)) + (Fraction(0),) * (nz - 1))
            return TruncatedSeries2D(tuple(rows))
        raise ValueError(f"unknown symbol {e.name!r}")
    if isinstance(e, Neg):
        return -expand(e.arg, nt, nz)
    if isinstance(e, Pow):
        base = expand(e.base, nt, nz)
        n = abs(e.exponent)
        out = constant_2d(1, nt, nz)
        while n:
            if n & 1:
                out = mul_2d(out, base)
            n >>= 1
            if n:
                base = mul_2d(base, base)
        return _reciprocal(out) if e.exponent < 0 else out
    if isinstance(e, BinOp):
        a = expand(e.left, nt, nz)
        c = _constant_value(e.right)
        if c is not None and e.op in ("*", "/"):
            if e.op == "/" and c == 0:
                raise NonInvertibleError("division by zero")
            factor = c if e.op == "*" else 1 / c
            return a.map_rows(lambda r: r * factor)
        b = expand(e.right, nt, nz)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return mul_2d(a, b)
        return mul_2d(a, _reciprocal(b))
    raise ValueError("function calls are not allowed in expressions")


def _reciprocal(s: TruncatedSeries2D) -> TruncatedSeries2D:
    if s.rows[0][0] == 0:
        raise NonInvertibleError("expression has a pole at the origin")
    return reciprocal_2d(s)


def expand_z(e: Expr, order: int) -> TruncatedSeries1D:
    return expand(e, 0, order).rows[0]


# ---------------------------------------------------------------------------
# Problem files
# ---------------------------------------------------------------------------


@dataclass
class Entry:
    key: str
    raw: str
    ast: object
    line: int
    col: int


@dataclass
class ProblemFile:
    """Parsed file: syntax trees, options, and the expanded problem."""

    text: str
    entries: dict
    options: dict
    problem: CauchyProblem
    moment_specs: dict = field(default_factory=dict)

    def pretty(self) -> str:
        """Canonical text of the file; parses back to an equal problem."""
        lines = []
        order = ["k", "p", "m1", "m2", "s1", "s2", "a"]
        order += [f"phi_{j}" for j in range(self.problem.k)] + ["f", "r"]
        for key in order:
            if key in ("m1", "m2"):
                lines.append(f"{key} = {self.moment_specs[key].spec()}")
            elif key in self.entries:
                lines.append(f"{key} = {to_text(self.entries[key].ast)}")
        for key in OPTION_KEYS:
            if key in self.entries:
                lines.append(f"{key} = {to_text(self.entries[key].ast)}")
        return "\n".join(lines) + "\n"


def _moment_spec(e: Expr, entry: Entry) -> MomentSequence:
    if not isinstance(e, Call):
        raise ParseError("expected gevrey(a), qfact(q) or product(m, m)", entry.line, entry.col)
    try:
        if e.name in ("gevrey", "qfact"):
            if len(e.args) != 1:
                raise ParseError(f"{e.name} takes one argument", entry.line, entry.col)
            value = _constant_value(e.args[0])
            if value is None:
                raise ParseError(f"{e.name} needs a rational constant", entry.line, entry.col)
            return gevrey_moments(value) if e.name == "gevrey" else q_factorial_moments(value)
        if e.name == "product":
            if len(e.args) != 2:
                raise ParseError("product takes two moment specs", entry.line, entry.col)
            return product_moments(_moment_spec(e.args[0], entry), _moment_spec(e.args[1], entry))
    except MathDomainError as exc:
        raise ParseError(str(exc), entry.line, entry.col) from exc
    raise ParseError(f"unknown moment sequence {e.name!r}", entry.line, entry.col)


def _read_entries(text: str) -> dict:
    entries = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        body = raw_line.split("#", 1)[0]
        if not body.strip():
            continue
        if "=" not in body:
            col = len(body) - len(body.lstrip()) + 1
            raise ParseError("expected 'key = value'", lineno, col)
        key_part, value_part = body.split("=", 1)
        key = key_part.strip()
        key_col = len(key_part) - len(key_part.lstrip()) + 1
        if not (key in PROBLEM_KEYS or key in OPTION_KEYS or re.fullmatch(r"phi_\d+", key)):
            raise ParseError(f"unknown key {key!r}", lineno, key_col)
        if key in entries:
            raise ParseError(f"duplicate key {key!r}", lineno, key_col)
        value_col = len(key_part) + 1
        if not value_part.strip():
            raise ParseError(f"missing value for {key!r}", lineno, value_col + 1)
        if key == "tgrid":
            parts, ast, offset = value_part.split(","), [], value_col
            for part in parts:
                ast.append(parse_expression(part, lineno, offset))
                offset += len(part) + 1
            ast = Call("tgrid", tuple(ast))
        else:
            ast = parse_expression(value_part, lineno, value_col)
        entries[key] = Entry(key, value_part.strip(), ast, lineno, value_col + 1)
    return entries


def _int_entry(entries, key, lo=None) -> int:
    e = entries[key]
    v = _constant_value(e.ast)
    if v is None or v.denominator != 1:
        raise ParseError(f"{key} must be an integer", e.line, e.col)
    if lo is not None and v < lo:
        raise ParseError(f"{key} must be at least {lo}", e.line, e.col)
    return int(v)


def _rational_entry(entries, key) -> Fraction:
    e = entries[key]
    v = _constant_value(e.ast)
    if v is None:
        raise ParseError(f"{key} must be a rational constant", e.line, e.col)
    return v


def _options(entries) -> dict:
    opts = dict(DEFAULT_OPTIONS)
    for key in OPTION_KEYS:
        if key not in entries:
            continue
        e = entries[key]
        try:
            if key in ("nt", "nz", "Q"):
                opts[key] = _int_entry(entries, key, 0)
            elif key == "rprime":
                opts[key] = _rational_entry(entries, key)
            elif key == "tgrid":
                opts[key] = [_real_value(a) for a in e.ast.args]
            else:
                opts[key] = _real_value(e.ast)
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(str(exc), e.line, e.col) from exc
    return opts


def parse_problem_file(text: str, nt: Optional[int] = None, nz: Optional[int] = None) -> ProblemFile:
    """Parse ``text``; ``nt``/``nz`` override the file's truncation options."""
    entries = _read_entries(text)
    last = len(text.splitlines()) or 1
    for key in ("k", "p", "m1", "m2", "a"):
        if key not in entries:
            raise ParseError(f"missing required key {key!r}", last, 1)
    k = _int_entry(entries, "k", 1)
    p = _int_entry(entries, "p", 1)
    if not k < p:
        raise ParseError(f"k<p required (got k={k}, p={p})", entries["k"].line, entries["k"].col)
    for j in range(k):
        if f"phi_{j}" not in entries:
            raise ParseError(f"missing phi_{j} (k={k} initial functions are required)", last, 1)
    for key in entries:
        if key.startswith("phi_") and int(key[4:]) >= k:
            e = entries[key]
            raise ParseError(f"{key} given but k={k}", e.line, e.col)
    opts = _options(entries)
    if nt is not None:
        opts["nt"] = nt
    if nz is not None:
        opts["nz"] = nz
    m1 = _moment_spec(entries["m1"].ast, entries["m1"])
    m2 = _moment_spec(entries["m2"].ast, entries["m2"])
    s1 = _rational_entry(entries, "s1") if "s1" in entries else None
    s2 = _rational_entry(entries, "s2") if "s2" in entries else None
    r = _rational_entry(entries, "r") if "r" in entries else Fraction(1)

    budget = opts["nz"] + p * (opts["nt"] // k)
    z_only = ["a"] + [f"phi_{j}" for j in range(k)]
    series = {}
    for key in z_only:
        e = entries[key]
        bad = _variables(e.ast) - {"z"}
        if bad:
            raise ParseError(f"{key} may only depend on z, found {sorted(bad)}", e.line, e.col)
        series[key] = _expand_entry(e, 0, budget).rows[0]
    if series["a"][0] == 0:
        e = entries["a"]
        raise ParseError("a(0) must be nonzero", e.line, e.col)
    f = None
    if "f" in entries:
        e = entries["f"]
        bad = _variables(e.ast) - {"t", "z"}
        if bad:
            raise ParseError(f"f may only depend on t and z, found {sorted(bad)}", e.line, e.col)
        if _constant_value(e.ast) != 0:
            f = _expand_entry(e, max(opts["nt"] - k, 0), budget)
    try:
        problem = CauchyProblem(k, p, m1, m2, series["a"], [series[f"phi_{j}"] for j in range(k)],
                                f=f, s1=s1, s2=s2, r=r)
    except MathDomainError as exc:
        raise ParseError(str(exc), entries["k"].line, 1) from exc
    return ProblemFile(text, entries, opts, problem, {"m1": m1, "m2": m2})


def _expand_entry(e: Entry, nt: int, nz: int) -> TruncatedSeries2D:
    try:
        return expand(e.ast, nt, nz)
    except NonInvertibleError as exc:
        raise ParseError(f"{e.key}: {exc}", e.line, e.col) from exc
    except ValueError as exc:
        raise ParseError(f"{e.key}: {exc}", e.line, e.col) from exc


def parse_problem(text: str, nt: Optional[int] = None, nz: Optional[int] = None) -> CauchyProblem:
    return parse_problem_file(text, nt, nz).problem
