"""Closed-form expressions for metric components and scalar fields.

Grammar (whitespace insensitive)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := primary ('^' unary)?          # right associative
    primary := NUMBER | NAME | NAME '(' expr ')' | '(' expr ')'

Expressions evaluate either to floats or to jets at a base point.  A
``MetricField`` bundles the component expressions of ``g_ij`` together with
coordinate names and numeric parameters; parameters are folded into literals
when the field is built.
"""

from __future__ import annotations

import hashlib
import math
import re
from dataclasses import dataclass, field as dc_field
from typing import Mapping, Sequence

import numpy as np

from .errors import ParseError, SingularPointError, ValidationError
from .jet import Jet, basis, jet_variable

FUNCTIONS = ("exp", "log", "sin", "cos", "tan", "sqrt", "abs")


# ---------------------------------------------------------------------------
# syntax tree


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class Bin:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    fn: str
    arg: "Expr"


Expr = Num | Var | Neg | Bin | Call


def num(x):
    return Num(float(x))


def add(a, b):
    return Bin("+", a, b)


def mul(a, b):
    return Bin("*", a, b)


def names(e):
    """Set of identifiers appearing in ``e``."""
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, Num):
        return set()
    if isinstance(e, (Neg, Call)):
        return names(e.arg)
    return names(e.left) | names(e.right)


def substitute(e, values: Mapping[str, "Expr | float"]):
    if isinstance(e, Var):
        if e.name in values:
            v = values[e.name]
            return v if isinstance(v, (Num, Var, Neg, Bin, Call)) else num(v)
        return e
    if isinstance(e, Num):
        return e
    if isinstance(e, Neg):
        return Neg(substitute(e.arg, values))
    if isinstance(e, Call):
        return Call(e.fn, substitute(e.arg, values))
    return Bin(e.op, substitute(e.left, values), substitute(e.right, values))


# ---------------------------------------------------------------------------
# parser

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>\*\*|[-+*/^(),]))"
)


def _tokenize(src):
    tokens = []
    pos = 0
    while pos < len(src):
        if src[pos:].strip() == "":
            break
        m = _TOKEN.match(src, pos)
        if m is None or m.end() == pos:
            bad = pos + (len(src[pos:]) - len(src[pos:].lstrip()))
            raise ParseError(f"unexpected character {src[bad]!r}", bad, src)
        kind = m.lastgroup
        text = m.group(kind)
        start = m.start(kind)
        if text == "**":
            text = "^"
        tokens.append((kind, text, start))
        pos = m.end()
    tokens.append(("end", "", len(src)))
    return tokens


class _Parser:
    def __init__(self, src):
        self.src = src
        self.tokens = _tokenize(src)
        self.i = 0

    @property
    def tok(self):
        return self.tokens[self.i]

    def advance(self):
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expect(self, text):
        kind, got, pos = self.tok
        if got != text:
            what = "end of input" if kind == "end" else repr(got)
            raise ParseError(f"expected {text!r}, found {what}", pos, self.src)
        self.advance()

    def parse(self):
        e = self.expr()
        kind, text, pos = self.tok
        if kind != "end":
            raise ParseError(f"unexpected token {text!r}", pos, self.src)
        return e

    def expr(self):
        e = self.term()
        while self.tok[1] in ("+", "-") and self.tok[0] == "op":
            op = self.advance()[1]
            e = Bin(op, e, self.term())
        return e

    def term(self):
        e = self.unary()
        while self.tok[1] in ("*", "/") and self.tok[0] == "op":
            op = self.advance()[1]
            e = Bin(op, e, self.unary())
        return e

    def unary(self):
        if self.tok[0] == "op" and self.tok[1] == "-":
            self.advance()
            return Neg(self.unary())
        if self.tok[0] == "op" and self.tok[1] == "+":
            self.advance()
            return self.unary()
        return self.power()

    def power(self):
        base = self.primary()
        if self.tok[0] == "op" and self.tok[1] == "^":
            self.advance()
            return Bin("^", base, self.unary())
        return base

    def primary(self):
        kind, text, pos = self.tok
        if kind == "num":
            self.advance()
            return Num(float(text))
        if kind == "name":
            self.advance()
            if self.tok[1] == "(" and self.tok[0] == "op":
                if text not in FUNCTIONS:
                    raise ParseError(f"unknown function {text!r}", pos, self.src)
                self.advance()
                arg = self.expr()
                self.expect(")")
                return Call(text, arg)
            return Var(text)
        if kind == "op" and text == "(":
            self.advance()
            e = self.expr()
            self.expect(")")
            return e
        what = "end of input" if kind == "end" else repr(text)
        raise ParseError(f"unexpected {what}", pos, self.src)


def parse_expr(src: str) -> Expr:
    if not isinstance(src, str) or not src.strip():
        raise ParseError("empty expression", 0, src)
    return _Parser(src).parse()


def as_expr(e) -> Expr:
    if isinstance(e, str):
        return parse_expr(e)
    if isinstance(e, (int, float)):
        return num(e)
    return e


# ---------------------------------------------------------------------------
# pretty printer

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}


def _prec(e):
    if isinstance(e, Bin):
        return _PREC[e.op]
    if isinstance(e, Neg):
        return 3
    if isinstance(e, Num) and e.value < 0:
        return 0
    return 5


def to_str(e) -> str:
    """Render ``e`` so that parsing the result gives back the same tree."""
    if isinstance(e, Num):
        v = e.value
        s = str(int(v)) if v == int(v) and abs(v) < 1e15 else repr(v)
        return f"({s})" if v < 0 else s
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Call):
        return f"{e.fn}({to_str(e.arg)})"
    if isinstance(e, Neg):
        inner = to_str(e.arg)
        return "-" + (inner if _prec(e.arg) >= 3 else f"({inner})")
    p = _PREC[e.op]
    left, right = to_str(e.left), to_str(e.right)
    if e.op == "^":
        if _prec(e.left) <= p:
            left = f"({left})"
        if _prec(e.right) < 3:
            right = f"({right})"
        return f"{left}^{right}"
    if _prec(e.left) < p:
        left = f"({left})"
    if _prec(e.right) <= p:
        right = f"({right})"
    return f"{left} {e.op} {right}"


# ---------------------------------------------------------------------------
# evaluation


def _is_constant(e):
    return not names(e)


def eval_float(e, values: Mapping[str, float]) -> float:
    """Plain floating-point evaluation (used by finite-difference checks)."""
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        try:
            return float(values[e.name])
        except KeyError:
            raise ValidationError(f"unknown identifier {e.name!r}") from None
    if isinstance(e, Neg):
        return -eval_float(e.arg, values)
    if isinstance(e, Call):
        x = eval_float(e.arg, values)
        if e.fn == "abs":
            return abs(x)
        if e.fn in ("log", "sqrt") and x <= 0:
            raise SingularPointError(f"{e.fn} of non-positive value in {to_str(e)}")
        return getattr(math, e.fn)(x)
    a, b = eval_float(e.left, values), eval_float(e.right, values)
    if e.op == "+":
        return a + b
    if e.op == "-":
        return a - b
    if e.op == "*":
        return a * b
    if e.op == "/":
        if b == 0:
            raise SingularPointError(f"division by zero in {to_str(e)}")
        return a / b
    if b != int(b) and a <= 0:
        raise SingularPointError(f"non-integer power of non-positive base in {to_str(e)}")
    return a**b


def _annotate(exc, node):
    if getattr(exc, "_annotated", False):
        return exc
    new = SingularPointError(f"{exc} in subexpression {to_str(node)!r}")
    new._annotated = True
    return new


def eval_jet_env(e, env: Mapping[str, Jet], n: int, order: int) -> Jet:
    """Evaluate ``e`` with identifiers bound to jets in ``env``."""
    if isinstance(e, Num):
        return Jet.constant(e.value, n, order)
    if isinstance(e, Var):
        try:
            return env[e.name]
        except KeyError:
            raise ValidationError(f"unknown identifier {e.name!r}") from None
    if isinstance(e, Neg):
        return -eval_jet_env(e.arg, env, n, order)
    try:
        if isinstance(e, Call):
            x = eval_jet_env(e.arg, env, n, order)
            if e.fn == "abs":
                return abs(x)
            return getattr(x, e.fn)()
        if e.op == "^" and _is_constant(e.right):
            base = eval_jet_env(e.left, env, n, order)
            return base.pow(eval_float(e.right, {}))
        a = eval_jet_env(e.left, env, n, order)
        b = eval_jet_env(e.right, env, n, order)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        if e.op == "/":
            return a / b
        if a.value <= 0:
            raise SingularPointError("variable exponent requires a positive base")
        return (b * a.log()).exp()
    except SingularPointError as exc:
        raise _annotate(exc, e) from None


# ---------------------------------------------------------------------------
# metric fields


@dataclass(frozen=True)
class MetricField:
    """Component expressions ``g_ij`` over a single coordinate chart."""

    coords: tuple
    components: tuple  # n x n nested tuples of Expr (parameters unresolved)
    params: Mapping[str, float] = dc_field(default_factory=dict)
    signature: tuple | None = None
    name: str = ""

    def __post_init__(self):
        n = len(self.coords)
        if n < 1:
            raise ValidationError("metric needs at least one coordinate")
        if len(set(self.coords)) != n:
            raise ValidationError(f"duplicate coordinate names in {self.coords}")
        clash = set(self.coords) & (set(self.params) | set(FUNCTIONS))
        if clash:
            raise ValidationError(f"coordinate names clash with parameters/functions: {sorted(clash)}")
        comps = tuple(tuple(as_expr(c) for c in row) for row in self.components)
        if len(comps) != n or any(len(row) != n for row in comps):
            raise ValidationError(f"components must form a {n}x{n} array")
        for i in range(n):
            for j in range(i):
                if comps[i][j] != comps[j][i]:
                    raise ValidationError(f"components g[{j + 1}][{i + 1}] and g[{i + 1}][{j + 1}] differ")
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "params", dict(self.params))
        sig = self.signature if self.signature is not None else (1,) * n
        if len(sig) != n or any(s not in (1, -1) for s in sig):
            raise ValidationError(f"signature must be {n} entries of +1/-1")
        object.__setattr__(self, "signature", tuple(int(s) for s in sig))
        allowed = set(self.coords)
        resolved = []
        for i in range(n):
            row = []
            for j in range(n):
                if j < i:
                    row.append(resolved[j][i])
                    continue
                e = substitute(comps[i][j], self.params)
                unknown = names(e) - allowed
                if unknown:
                    raise ValidationError(
                        f"unknown identifier(s) {sorted(unknown)} in g[{i + 1}][{j + 1}]"
                    )
                row.append(e)
            resolved.append(row)
        object.__setattr__(self, "_resolved", tuple(tuple(r) for r in resolved))

    @property
    def dim(self):
        return len(self.coords)

    def resolved(self, i, j):
        return self._resolved[i][j]

    @classmethod
    def from_strings(cls, coords, components, params=None, signature=None, name=""):
        """``components`` is an n x n nested list, or a dict ``{(i, j): expr}``
        with 0-based indices (missing entries default to 0)."""
        coords = tuple(coords)
        n = len(coords)
        if isinstance(components, Mapping):
            grid = [[num(0.0)] * n for _ in range(n)]
            for (i, j), src in components.items():
                grid[i][j] = grid[j][i] = as_expr(src)
        else:
            grid = [[as_expr(c) for c in row] for row in components]
        return cls(coords, tuple(tuple(r) for r in grid), params or {}, signature, name)

    def resolve_expr(self, e) -> Expr:
        """Parse (if needed), fold parameters and check identifiers of ``e``."""
        e = substitute(as_expr(e), self.params)
        unknown = names(e) - set(self.coords)
        if unknown:
            raise ValidationError(f"unknown identifier(s) {sorted(unknown)}")
        return e

    def env(self, point, order):
        point = np.asarray(point, dtype=float)
        if point.shape != (self.dim,):
            raise ValidationError(f"point must have {self.dim} coordinates, got {point.shape}")
        return {c: jet_variable(i, point[i], self.dim, order) for i, c in enumerate(self.coords)}

    def eval_jet(self, e, point, order) -> Jet:
        env = self.env(point, order)
        return eval_jet_env(self.resolve_expr(e), env, self.dim, order)

    def eval_float(self, e, point) -> float:
        return eval_float(self.resolve_expr(e), dict(zip(self.coords, map(float, point))))

    def metric_jets(self, point, order):
        """Array ``g[i, j, :]`` of component jets at ``point``."""
        n = self.dim
        env = self.env(point, order)
        out = np.zeros((n, n, basis(n, order).size))
        for i in range(n):
            for j in range(i, n):
                out[i, j] = out[j, i] = eval_jet_env(self._resolved[i][j], env, n, order).coeffs
        return out

    def metric_value(self, point):
        n = self.dim
        vals = dict(zip(self.coords, map(float, point)))
        g = np.empty((n, n))
        for i in range(n):
            for j in range(i, n):
                g[i, j] = g[j, i] = eval_float(self._resolved[i][j], vals)
        return g

    # -- expression-level transformations
    def map_components(self, fn, name=None):
        n = self.dim
        grid = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                grid[i][j] = grid[j][i] = fn(i, j, self.components[i][j])
        return MetricField(self.coords, tuple(tuple(r) for r in grid), self.params,
                           self.signature, name if name is not None else self.name)

    def scaled(self, factor):
        """Constant rescaling ``factor * g``."""
        f = num(factor)
        return self.map_components(lambda i, j, c: c if c == Num(0.0) else mul(f, c),
                                   name=f"{factor}*({self.name})")

    # -- file format
    def to_text(self) -> str:
        lines = [f"dim = {self.dim}",
                 "signature = " + ",".join(f"{s:+d}" for s in self.signature),
                 "coords = " + ",".join(self.coords)]
        for k, v in self.params.items():
            lines.append(f"param {k} = {v!r}")
        for i in range(self.dim):
            for j in range(i, self.dim):
                c = self.components[i][j]
                if c != Num(0.0):
                    lines.append(f"g[{i + 1}][{j + 1}] = {to_str(c)}")
        return "\n".join(lines) + "\n"

    def identity(self) -> str:
        if self.name:
            return self.name
        return "sha256:" + hashlib.sha256(self.to_text().encode()).hexdigest()[:16]


_COMPONENT = re.compile(r"^g\[(\d+)\]\[(\d+)\]$")


def parse_metric_text(text: str, name: str = "") -> MetricField:
    """Parse the plain-text metric definition format."""
    dim = None
    signature = None
    coords = None
    params = {}
    entries = {}
    offset = 0
    for lineno, raw in enumerate(text.splitlines(keepends=True), start=1):
        line = raw.split("#", 1)[0].strip()
        line_offset = offset
        offset += len(raw.encode("utf-8"))
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"line {lineno}: expected 'key = value'", line_offset, text)
        key, value = (s.strip() for s in line.split("=", 1))
        value_offset = line_offset + len(raw[: raw.index("=") + 1].encode("utf-8"))
        value_offset += len(raw[raw.index("=") + 1:]) - len(raw[raw.index("=") + 1:].lstrip())
        try:
            if key == "dim":
                dim = int(value)
            elif key == "signature":
                signature = tuple(int(float(s)) for s in value.split(","))
            elif key == "coords":
                coords = tuple(s.strip() for s in value.split(","))
            elif key.startswith("param"):
                pname = key[len("param"):].strip()
                if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", pname):
                    raise ParseError(f"line {lineno}: bad parameter name {pname!r}", line_offset, text)
                params[pname] = float(value)
            else:
                m = _COMPONENT.match(key.replace(" ", ""))
                if not m:
                    raise ParseError(f"line {lineno}: unknown key {key!r}", line_offset, text)
                i, j = int(m.group(1)), int(m.group(2))
                if i > j:
                    raise ParseError(f"line {lineno}: only g[i][j] with i <= j may be given", line_offset, text)
                try:
                    entries[(i - 1, j - 1)] = parse_expr(value)
                except ParseError as exc:
                    raise ParseError(f"line {lineno}: {exc.args[0]}", value_offset + (exc.pos or 0), text) from None
        except ValueError as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(f"line {lineno}: {exc}", line_offset, text) from None
    if coords is None:
        raise ParseError("missing 'coords' line", 0, text)
    if dim is None:
        dim = len(coords)
    if dim != len(coords):
        raise ValidationError(f"dim = {dim} but {len(coords)} coordinates given")
    for (i, j) in entries:
        if not (0 <= i < dim and 0 <= j < dim):
            raise ValidationError(f"component g[{i + 1}][{j + 1}] out of range for dim {dim}")
    return MetricField.from_strings(coords, entries, params, signature, name)


def load_metric(path) -> MetricField:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    f = parse_metric_text(text)
    return MetricField(f.coords, f.components, f.params, f.signature,
                       "sha256:" + hashlib.sha256(text.encode()).hexdigest()[:16])


def eval_jet(e, field: MetricField, point, order) -> Jet:
    return field.eval_jet(e, point, order)
