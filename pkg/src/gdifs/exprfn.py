"""Parser and evaluator for closed-form real functions of one variable.

The grammar covers exactly what the bundled map definitions need: numeric
literals (integers, decimals, scientific notation), the variable ``x``,
binary ``+ - * / ^``, unary minus and parentheses.  ``^`` binds tightest and
is right-associative; unary minus sits between ``^`` and ``* /``, so
``-x^2`` means ``-(x^2)``.  Multiplication is always explicit (``6*x``, not
``6x``) and exponents must be constant subexpressions.

Parsed expressions are immutable and compile once to a plain Python lambda,
so they are cheap to evaluate in tight iteration loops and safe to share
across workers.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "DomainError",
    "Expr",
    "ParseError",
    "PointMap",
    "SelfMapReport",
    "check_self_map",
    "parse",
]


class ParseError(ValueError):
    """Syntax error with the byte offset and the token set expected there."""

    def __init__(self, message, position, expected=()):
        self.position = position
        self.expected = tuple(expected)
        suffix = ""
        if self.expected:
            suffix = " (expected %s)" % ", ".join(self.expected)
        super().__init__(f"{message} at offset {position}{suffix}")


class DomainError(ArithmeticError):
    """Evaluation left the reals: division by zero or an invalid power."""

    def __init__(self, message, x=None):
        self.x = x
        if x is not None:
            message = f"{message} at x={x!r}"
        super().__init__(message)


def _pow(base, exponent):
    """Power with real-valued semantics for scalars and numpy arrays.

    Scalars go through math.pow, arrays through np.power; the two can differ
    by one ulp.  Every other operator is the same IEEE operation on both
    paths.
    """
    if isinstance(base, np.ndarray) or isinstance(exponent, np.ndarray):
        return np.power(base, exponent)
    return math.pow(base, exponent)


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------

_PREC_ADD, _PREC_MUL, _PREC_NEG, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4, 5


class _Num:
    __slots__ = ("value",)

    def __init__(self, value):
        self.value = value

    precedence = _PREC_ATOM

    def source(self):
        v = self.value
        if v == int(v) and abs(v) < 1e16:
            return str(int(v))
        return repr(v)

    def pysource(self):
        return repr(self.value)

    def uses_x(self):
        return False


class _Var:
    __slots__ = ()

    precedence = _PREC_ATOM

    def source(self):
        return "x"

    def pysource(self):
        return "x"

    def uses_x(self):
        return True


class _Neg:
    __slots__ = ("arg",)

    def __init__(self, arg):
        self.arg = arg

    precedence = _PREC_NEG

    def source(self):
        return "-" + _wrap(self.arg, _PREC_NEG)

    def pysource(self):
        return f"(-{self.arg.pysource()})"

    def uses_x(self):
        return self.arg.uses_x()


class _BinOp:
    __slots__ = ("op", "left", "right")

    def __init__(self, op, left, right):
        self.op = op
        self.left = left
        self.right = right

    @property
    def precedence(self):
        return _PREC_POW if self.op == "^" else (_PREC_MUL if self.op in "*/" else _PREC_ADD)

    def source(self):
        p = self.precedence
        if self.op == "^":
            # right-associative: parenthesize an equal-precedence left child
            left = _wrap(self.left, p + 1)
            right = _wrap(self.right, p)
        else:
            left = _wrap(self.left, p)
            right = _wrap(self.right, p + 1)
        return f"{left}{self.op}{right}"

    def pysource(self):
        a, b = self.left.pysource(), self.right.pysource()
        if self.op == "^":
            return f"_pow({a}, {b})"
        return f"({a}{self.op}{b})"

    def uses_x(self):
        return self.left.uses_x() or self.right.uses_x()


def _wrap(node, min_prec):
    text = node.source()
    if node.precedence < min_prec:
        return f"({text})"
    return text


# ---------------------------------------------------------------------------
# Tokenizer / recursive-descent parser
# ---------------------------------------------------------------------------

_OPERATORS = set("+-*/^()")


class _Parser:
    def __init__(self, src):
        self.src = src
        self.pos = 0
        self.tokens = []
        self._tokenize()
        self.index = 0

    def _tokenize(self):
        src, i, n = self.src, 0, len(self.src)
        while i < n:
            c = src[i]
            if c in " \t":
                i += 1
                continue
            if c in _OPERATORS:
                self.tokens.append((c, c, i))
                i += 1
                continue
            if c.isdigit() or c == ".":
                j = i
                while j < n and src[j].isdigit():
                    j += 1
                if j < n and src[j] == ".":
                    j += 1
                    while j < n and src[j].isdigit():
                        j += 1
                if j < n and src[j] in "eE":
                    k = j + 1
                    if k < n and src[k] in "+-":
                        k += 1
                    if k < n and src[k].isdigit():
                        j = k
                        while j < n and src[j].isdigit():
                            j += 1
                text = src[i:j]
                try:
                    value = float(text)
                except ValueError:
                    raise ParseError(f"malformed number {text!r}", i) from None
                self.tokens.append(("num", value, i))
                i = j
                continue
            if c.isalpha() or c == "_":
                j = i
                while j < n and (src[j].isalnum() or src[j] == "_"):
                    j += 1
                name = src[i:j]
                if name != "x":
                    raise ParseError(f"unknown identifier {name!r}; only 'x' is defined", i)
                self.tokens.append(("x", name, i))
                i = j
                continue
            raise ParseError(f"unexpected character {c!r}", i)
        self.tokens.append(("end", "", n))

    def peek(self):
        return self.tokens[self.index]

    def advance(self):
        tok = self.tokens[self.index]
        self.index += 1
        return tok

    def expect(self, kind, expected):
        tok = self.peek()
        if tok[0] != kind:
            raise ParseError(f"unexpected {tok[1]!r}" if tok[0] != "end" else "unexpected end of input",
                             tok[2], expected)
        return self.advance()

    # expr := term (('+'|'-') term)*
    def expr(self):
        node = self.term()
        while self.peek()[0] in "+-":
            op = self.advance()[0]
            node = _BinOp(op, node, self.term())
        return node

    # term := unary (('*'|'/') unary)*
    def term(self):
        node = self.unary()
        while self.peek()[0] in "*/":
            op = self.advance()[0]
            node = _BinOp(op, node, self.unary())
        return node

    # unary := '-' unary | power
    def unary(self):
        if self.peek()[0] == "-":
            self.advance()
            return _Neg(self.unary())
        return self.power()

    # power := atom ('^' unary)?   -- right-associative via the unary recursion
    def power(self):
        node = self.atom()
        if self.peek()[0] == "^":
            pos = self.peek()[2]
            self.advance()
            exponent = self.unary()
            if exponent.uses_x():
                raise ParseError("exponent must be a constant expression", pos)
            node = _BinOp("^", node, exponent)
        return node

    def atom(self):
        tok = self.peek()
        if tok[0] == "num":
            self.advance()
            return _Num(tok[1])
        if tok[0] == "x":
            self.advance()
            return _Var()
        if tok[0] == "(":
            self.advance()
            node = self.expr()
            self.expect(")", ["')'"])
            return node
        raise ParseError(f"unexpected {tok[1]!r}" if tok[0] != "end" else "unexpected end of input",
                         tok[2], ["number", "'x'", "'('", "'-'"])


class Expr:
    """A parsed expression; immutable, evaluates in IEEE double precision."""

    def __init__(self, ast, source):
        self._ast = ast
        self.source = source
        self.fn = eval("lambda x: " + ast.pysource(), {"_pow": _pow})  # noqa: S307 - own codegen

    def __repr__(self):
        return f"Expr({self.source!r})"

    def to_source(self):
        """Canonical text form; reparsing it evaluates identically."""
        return self._ast.source()

    def eval(self, x):
        """Evaluate at a single point, raising DomainError off the reals."""
        try:
            value = self.fn(x)
        except ZeroDivisionError:
            raise DomainError("division by zero", x) from None
        except (ValueError, OverflowError) as exc:
            raise DomainError(str(exc), x) from None
        if not math.isfinite(value):
            raise DomainError("non-finite result", x)
        return value

    def eval_array(self, xs):
        """Vectorized evaluation; any non-finite entry raises with a witness."""
        xs = np.asarray(xs, dtype=float)
        with np.errstate(all="ignore"):
            values = self.fn(xs)
        values = np.asarray(values, dtype=float)
        if values.shape != xs.shape:  # constant expression
            values = np.full(xs.shape, float(values))
        bad = ~np.isfinite(values)
        if bad.any():
            raise DomainError("non-finite result", float(xs[bad][0]))
        return values


def parse(src):
    """Parse an expression string into an Expr.

    Raises ParseError (with byte offset) on malformed input and on any
    identifier other than ``x``.
    """
    if not src or not src.strip():
        raise ParseError("empty expression", 0)
    parser = _Parser(src)
    ast = parser.expr()
    tok = parser.peek()
    if tok[0] != "end":
        raise ParseError(f"unexpected {tok[1]!r}", tok[2], ["operator", "end of input"])
    return Expr(ast, src)


# ---------------------------------------------------------------------------
# Self-map check
# ---------------------------------------------------------------------------

class SelfMapReport:
    """Outcome of a sampled range check, with the worst witness found."""

    def __init__(self, passed, worst_x=None, worst_value=None, error=None):
        self.passed = passed
        self.worst_x = worst_x
        self.worst_value = worst_value
        self.error = error

    def __repr__(self):
        if self.passed:
            return "SelfMapReport(pass)"
        return f"SelfMapReport(fail, x={self.worst_x!r}, value={self.worst_value!r}, error={self.error!r})"


def check_self_map(expr, lo, hi, n_samples=1000, slack=1e-12):
    """Check that expr maps [lo, hi] into itself on an equispaced grid.

    Endpoints are included.  Evaluation domain errors count as failures and
    report the offending x.
    """
    if not lo < hi:
        raise ValueError("need lo < hi")
    if n_samples < 2:
        raise ValueError("need n_samples >= 2")
    xs = np.linspace(lo, hi, n_samples)
    try:
        values = expr.eval_array(xs)
    except DomainError as exc:
        return SelfMapReport(False, worst_x=exc.x, error=str(exc))
    overshoot = np.maximum(values - hi, lo - values)
    worst = int(np.argmax(overshoot))
    if overshoot[worst] > slack:
        return SelfMapReport(False, worst_x=float(xs[worst]), worst_value=float(values[worst]))
    return SelfMapReport(True, worst_x=float(xs[worst]), worst_value=float(values[worst]))


# ---------------------------------------------------------------------------
# Point maps (one expression per coordinate)
# ---------------------------------------------------------------------------

class PointMap:
    """A self-map of [0,1] or [0,1]^2 built from one Expr per coordinate.

    Two-dimensional maps act coordinate-wise: (x, y) -> (f(x), g(y)).
    """

    def __init__(self, *exprs):
        if len(exprs) not in (1, 2):
            raise ValueError("PointMap takes one or two expressions")
        self.exprs = tuple(exprs)
        self.dim = len(exprs)

    @classmethod
    def from_strings(cls, *sources):
        return cls(*(parse(s) for s in sources))

    def sources(self):
        return tuple(e.source for e in self.exprs)

    def __repr__(self):
        return "PointMap(%s)" % ", ".join(repr(s) for s in self.sources())

    def __call__(self, point):
        if self.dim == 1:
            return self.exprs[0].eval(float(point))
        x, y = point
        return (self.exprs[0].eval(float(x)), self.exprs[1].eval(float(y)))

    def apply_array(self, pts):
        """Map an (n,) or (n,2) array of points; raises DomainError with witness."""
        pts = np.asarray(pts, dtype=float)
        if self.dim == 1:
            return self.exprs[0].eval_array(pts)
        return np.column_stack([self.exprs[0].eval_array(pts[:, 0]),
                                self.exprs[1].eval_array(pts[:, 1])])
