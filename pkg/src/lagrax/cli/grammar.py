"""Parenthesized prefix notation for expressions, operators, matrices and rules.

See ``docs/grammar.md`` for the full description. A document is a sequence
of top-level forms; declarations must precede the forms that use them.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from ..jetalg import ChartVar, GaussQ, I, IndepVar, JetCoord, Param, Poly, ShiftCoord
from ..jetalg.poly import jet_coord
from ..psido import PsiDO


class GrammarError(ValueError):
    """Syntax error with 1-based line/column of the offending token."""

    code = "parse_error"

    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.line, self.col = line, col
        where = f"line {line}, column {col}: " if line else ""
        super().__init__(where + message)


class UndeclaredSymbolError(GrammarError):
    code = "undeclared_symbol"


@dataclass
class Token:
    text: str
    line: int
    col: int


@dataclass
class Node:
    """Either an atom (``text`` set) or a list (``items`` set)."""

    text: str | None
    items: list | None
    line: int
    col: int

    @property
    def is_list(self) -> bool:
        return self.items is not None

    def head(self) -> str | None:
        if self.items and not self.items[0].is_list:
            return self.items[0].text
        return None


_TOKEN = re.compile(r";[^\n]*|[()]|[^\s();]+")


def tokenize(text: str) -> list:
    """Split into parentheses and atoms; ``;`` starts a comment."""
    out = []
    line_starts = [0] + [i + 1 for i, ch in enumerate(text) if ch == "\n"]
    line = 0
    for m in _TOKEN.finditer(text):
        tok = m.group()
        if tok.startswith(";"):
            continue
        while line + 1 < len(line_starts) and line_starts[line + 1] <= m.start():
            line += 1
        out.append(Token(tok, line + 1, m.start() - line_starts[line] + 1))
    return out


def read(text: str) -> list:
    """Parse text into a list of top-level :class:`Node` trees."""
    toks = tokenize(text)
    stack: list = [Node(None, [], 1, 1)]
    for t in toks:
        if t.text == "(":
            stack.append(Node(None, [], t.line, t.col))
        elif t.text == ")":
            if len(stack) == 1:
                raise GrammarError("unbalanced ')'", t.line, t.col)
            node = stack.pop()
            stack[-1].items.append(node)
        else:
            stack[-1].items.append(Node(t.text, None, t.line, t.col))
    if len(stack) != 1:
        node = stack[-1]
        raise GrammarError("unclosed '('", node.line, node.col)
    return stack[0].items


_RATIONAL = re.compile(r"^[+-]?\d+(/\d+)?$")


def _number(node: Node):
    if node.is_list or not _RATIONAL.match(node.text):
        return None
    q = Fraction(node.text)
    return q


@dataclass
class Declarations:
    fields: list = field(default_factory=lambda: ["u"])
    variables: list = field(default_factory=lambda: ["x"])
    params: list = field(default_factory=list)
    explicit: set = field(default_factory=set)

    def field_index(self, node: Node) -> int:
        if not node.is_list and node.text in self.fields:
            return self.fields.index(node.text)
        k = _int(node, "field index")
        if not 0 <= k < len(self.fields):
            raise UndeclaredSymbolError(
                f"field {k} is not declared ({len(self.fields)} field(s) available)", node.line, node.col
            )
        return k

    def var_index(self, node: Node) -> int:
        if not node.is_list and node.text in self.variables:
            return self.variables.index(node.text)
        k = _int(node, "variable index")
        if not 0 <= k < len(self.variables):
            raise UndeclaredSymbolError(
                f"independent variable {k} is not declared ({len(self.variables)} available)",
                node.line,
                node.col,
            )
        return k


def _int(node: Node, what: str) -> int:
    if node.is_list or not re.match(r"^[+-]?\d+$", node.text):
        raise GrammarError(f"expected an integer {what}", node.line, node.col)
    return int(node.text)


def _expect_list(node: Node, what: str) -> list:
    if not node.is_list:
        raise GrammarError(f"expected {what}", node.line, node.col)
    return node.items


def parse_expr(node: Node, decl: Declarations) -> Poly:
    if not node.is_list:
        q = _number(node)
        if q is not None:
            return Poly.const(q)
        if node.text == "I":
            return Poly.const(I)
        if node.text == "lam":
            return Poly.var(Param("lam"))
        if node.text in decl.params:
            return Poly.var(Param(node.text))
        raise UndeclaredSymbolError(f"undeclared symbol '{node.text}'", node.line, node.col)
    items = node.items
    if not items:
        raise GrammarError("empty expression", node.line, node.col)
    head = node.head()
    args = items[1:]
    if head == "+":
        out = Poly()
        for a in args:
            out = out + parse_expr(a, decl)
        return out
    if head == "*":
        out = Poly.const(1)
        for a in args:
            out = out * parse_expr(a, decl)
        return out
    if head == "-":
        if not args:
            raise GrammarError("'-' needs an argument", node.line, node.col)
        first = parse_expr(args[0], decl)
        if len(args) == 1:
            return -first
        for a in args[1:]:
            first = first - parse_expr(a, decl)
        return first
    if head == "^":
        if len(args) != 2:
            raise GrammarError("'^' takes a base and an exponent", node.line, node.col)
        e = _int(args[1], "exponent")
        if e < 0:
            raise GrammarError("negative exponents are not polynomial", args[1].line, args[1].col)
        return parse_expr(args[0], decl) ** e
    if head == "/":
        if len(args) != 2:
            raise GrammarError("'/' takes an expression and a rational", node.line, node.col)
        q = _number(args[1])
        if q is None or q == 0:
            raise GrammarError("divisor must be a nonzero rational", args[1].line, args[1].col)
        return parse_expr(args[0], decl) / q
    if head == "u":
        if len(args) not in (1, 2):
            raise GrammarError("jet syntax is (u <field> (<orders>))", node.line, node.col)
        f = decl.field_index(args[0])
        orders = []
        if len(args) == 2:
            orders = [_int(o, "derivative order") for o in _expect_list(args[1], "an order list")]
            if len(orders) > len(decl.variables):
                raise UndeclaredSymbolError(
                    f"{len(orders)} derivative orders given but only {len(decl.variables)} variable(s) declared",
                    args[1].line,
                    args[1].col,
                )
            if any(o < 0 for o in orders):
                raise GrammarError("derivative orders must be nonnegative", args[1].line, args[1].col)
        return Poly.var(jet_coord(f, orders))
    if head == "x":
        if len(args) != 1:
            raise GrammarError("variable syntax is (x <index>)", node.line, node.col)
        return Poly.var(IndepVar(decl.var_index(args[0])))
    if head == "s":
        if len(args) != 2:
            raise GrammarError("lattice syntax is (s <field> <shift>)", node.line, node.col)
        return Poly.var(ShiftCoord(decl.field_index(args[0]), _int(args[1], "shift")))
    if head in ("q", "p"):
        if len(args) != 2:
            raise GrammarError(f"chart syntax is ({head} <field> <index>)", node.line, node.col)
        return Poly.var(ChartVar(head, decl.field_index(args[0]), _int(args[1], "index")))
    raise GrammarError(f"unknown operator '{head}'", node.line, node.col)


# -- printing -----------------------------------------------------------------

def _q(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _coeff(c) -> str:
    if isinstance(c, GaussQ):
        if c.re == 0:
            return "I" if c.im == 1 else f"(* {_q(c.im)} I)"
        return f"(+ {_q(c.re)} (* {_q(c.im)} I))"
    return _q(c)


def _var(v, decl: Declarations | None) -> str:
    t = type(v)
    if t is JetCoord:
        n = len(decl.variables) if decl else max(1, len(v.orders))
        orders = list(v.orders) + [0] * (n - len(v.orders))
        return f"(u {v.field} ({' '.join(str(o) for o in orders)}))"
    if t is IndepVar:
        return f"(x {v.index})"
    if t is ShiftCoord:
        return f"(s {v.field} {v.shift})"
    if t is ChartVar:
        return f"({v.kind} {v.field} {v.index})"
    if t is Param:
        return v.name
    raise TypeError(v)


def to_prefix(p: Poly, decl: Declarations | None = None) -> str:
    if not p:
        return "0"
    terms = []
    for mono, c in p.terms():
        factors = []
        for v, e in mono:
            s = _var(v, decl)
            factors.append(s if e == 1 else f"(^ {s} {e})")
        if not factors:
            terms.append(_coeff(c))
        elif c == 1 and len(factors) == 1:
            terms.append(factors[0])
        elif c == 1:
            terms.append(f"(* {' '.join(factors)})")
        else:
            terms.append(f"(* {_coeff(c)} {' '.join(factors)})")
    return terms[0] if len(terms) == 1 else f"(+ {' '.join(terms)})"


def matrix_to_prefix(m, decl: Declarations | None = None) -> str:
    return " ".join("(row " + " ".join(to_prefix(e, decl) for e in r) + ")" for r in m)


# -- documents ------------------------------------------------------------------

@dataclass
class Form:
    kind: str
    name: str | None
    value: object
    extra: tuple = ()


@dataclass
class ExprDocument:
    decl: Declarations
    forms: list

    def find(self, kind: str, name: str | None = None) -> list:
        return [f for f in self.forms if f.kind == kind and (name is None or f.name == name)]

    def first(self, kind: str, what: str | None = None):
        found = self.find(kind)
        if not found:
            raise GrammarError(f"document has no ({kind} ...) form" + (f" for {what}" if what else ""))
        return found[0]

    def __eq__(self, other):
        if not isinstance(other, ExprDocument):
            return NotImplemented
        if (self.decl.fields, self.decl.variables, self.decl.params) != (
            other.decl.fields,
            other.decl.variables,
            other.decl.params,
        ):
            return False
        if len(self.forms) != len(other.forms):
            return False
        for a, b in zip(self.forms, other.forms):
            if (a.kind, a.name, a.extra) != (b.kind, b.name, b.extra):
                return False
            if not (a.value == b.value):
                return False
        return True


def _names(items: list, what: str) -> list:
    out = []
    for n in items:
        if n.is_list or _RATIONAL.match(n.text):
            raise GrammarError(f"expected a {what} name", n.line, n.col)
        out.append(n.text)
    return out


def _parse_matrix(rows: list, decl: Declarations, node: Node):
    mat = []
    for r in rows:
        if r.head() != "row":
            raise GrammarError("matrix rows are written (row e1 e2 ...)", r.line, r.col)
        mat.append(tuple(parse_expr(e, decl) for e in r.items[1:]))
    if not mat or any(len(r) != len(mat) for r in mat):
        raise GrammarError("matrix must be square and nonempty", node.line, node.col)
    return tuple(mat)


def _optional_name(args: list):
    if args and not args[0].is_list and not _RATIONAL.match(args[0].text):
        return args[0].text, args[1:]
    return None, args


def parse(text: str) -> ExprDocument:
    """Parse a document; an implicit single field ``u`` and variable ``x`` apply
    until ``(fields ...)``/``(vars ...)`` declarations say otherwise."""
    decl = Declarations()
    forms: list = []
    for node in read(text):
        head = node.head()
        if head is None:
            # a bare expression is shorthand for (expr ...)
            forms.append(Form("expr", None, parse_expr(node, decl)))
            continue
        args = node.items[1:]
        if head in ("fields", "vars", "params"):
            if forms:
                raise GrammarError("declarations must precede all other forms", node.line, node.col)
            names = _names(args, head[:-1])
            if head != "params" and not names:
                raise GrammarError(f"({head}) needs at least one name", node.line, node.col)
            if len(set(names)) != len(names):
                raise GrammarError(f"duplicate names in ({head} ...)", node.line, node.col)
            key = {"fields": "fields", "vars": "variables", "params": "params"}[head]
            setattr(decl, key, names)
            decl.explicit.add(key)
            continue
        if head in ("density", "hamiltonian", "constraint", "expr"):
            name, rest = _optional_name(args)
            if len(rest) != 1:
                raise GrammarError(f"({head} [name] <expr>) takes one expression", node.line, node.col)
            forms.append(Form(head, name, parse_expr(rest[0], decl)))
        elif head == "symmetry":
            forms.append(Form("symmetry", None, tuple(parse_expr(a, decl) for a in args)))
        elif head == "matrix":
            name, rest = _optional_name(args)
            forms.append(Form("matrix", name, _parse_matrix(rest, decl, node)))
        elif head == "rule":
            if len(args) != 3:
                raise GrammarError("rule syntax is (rule <field> <variable> <expr>)", node.line, node.col)
            f = decl.field_index(args[0])
            v = decl.var_index(args[1])
            forms.append(Form("rule", None, parse_expr(args[2], decl), (f, v)))
        elif head == "operator":
            name, rest = _optional_name(args)
            forms.append(Form("operator", name, _parse_operator(rest, decl, node)))
        else:
            raise GrammarError(f"unknown form '{head}'", node.line, node.col)
    return ExprDocument(decl, forms)


def _parse_operator(terms: list, decl: Declarations, node: Node) -> PsiDO:
    coeffs = {}
    size = None
    for t in terms:
        if t.head() != "term" or len(t.items) < 3:
            raise GrammarError("operator terms are written (term <order> <expr or rows>)", t.line, t.col)
        k = _int(t.items[1], "order")
        body = t.items[2:]
        if body[0].head() == "row":
            m = _parse_matrix(body, decl, t)
        else:
            if len(body) != 1:
                raise GrammarError("scalar term takes a single expression", t.line, t.col)
            m = ((parse_expr(body[0], decl),),)
        if size is None:
            size = len(m)
        elif size != len(m):
            raise GrammarError("operator terms have inconsistent matrix sizes", t.line, t.col)
        if k in coeffs:
            raise GrammarError(f"order {k} given twice", t.line, t.col)
        coeffs[k] = m
    return PsiDO(coeffs, size or 1)


def print_document(doc: ExprDocument) -> str:
    d = doc.decl
    lines = [f"(fields {' '.join(d.fields)})", f"(vars {' '.join(d.variables)})"]
    if d.params:
        lines.append(f"(params {' '.join(d.params)})")
    for f in doc.forms:
        nm = f" {f.name}" if f.name else ""
        if f.kind in ("density", "hamiltonian", "constraint", "expr"):
            lines.append(f"({f.kind}{nm} {to_prefix(f.value, d)})")
        elif f.kind == "symmetry":
            lines.append("(symmetry " + " ".join(to_prefix(e, d) for e in f.value) + ")")
        elif f.kind == "matrix":
            lines.append(f"(matrix{nm} {matrix_to_prefix(f.value, d)})")
        elif f.kind == "rule":
            fi, vi = f.extra
            lines.append(f"(rule {fi} {vi} {to_prefix(f.value, d)})")
        elif f.kind == "operator":
            terms = []
            for k in f.value.orders():
                m = f.value.coeffs[k]
                body = to_prefix(m[0][0], d) if f.value.size == 1 else matrix_to_prefix(m, d)
                terms.append(f"(term {k} {body})")
            lines.append(f"(operator{nm} {' '.join(terms)})")
    return "\n".join(lines) + "\n"


def parse_expression(text: str, fields=1, variables=1, params=()) -> Poly:
    """Parse one expression; ``fields``/``variables`` may be counts or name lists."""
    decl = Declarations(
        list(fields) if not isinstance(fields, int) else ["u"] if fields == 1 else [f"u{i}" for i in range(fields)],
        list(variables) if not isinstance(variables, int) else ["x", "y", "t", "w"][:variables] if variables <= 4 else [f"x{i}" for i in range(variables)],
        list(params),
    )
    nodes = read(text)
    if len(nodes) != 1:
        raise GrammarError("expected exactly one expression")
    return parse_expr(nodes[0], decl)


__all__ = [
    "Declarations",
    "ExprDocument",
    "Form",
    "GrammarError",
    "UndeclaredSymbolError",
    "matrix_to_prefix",
    "parse",
    "parse_expr",
    "parse_expression",
    "print_document",
    "read",
    "to_prefix",
    "tokenize",
]
