"""Real-analytic expressions in t, z and their conjugates, with 2-jets.

Grammar (ASCII)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | '+' unary | atom
    atom   := number | name | name '(' expr (',' expr)* ')' | '(' expr ')'

Names: ``t``, ``z``, ``i``, ``pi``.  Functions: ``conj``, ``exp``, ``log``,
``abs2``, ``re``, ``im``, ``sqrt`` and ``pow(x, y)``; ``y`` may be any
expression, integer exponents are handled exactly.

Jets carry value, gradient and Hessian with respect to the four real
coordinates (Re t, Im t, Re z, Im z).
"""
from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .errors import ExpressionError

FUNCTIONS = {"conj": 1, "exp": 1, "log": 1, "abs2": 1, "re": 1, "im": 1, "sqrt": 1, "pow": 2}
CONSTANTS = {"i": 1j, "pi": np.pi}
VARIABLES = ("t", "z")

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/(),]))"
)


# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Num:
    value: complex


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Unary:
    op: str
    arg: object


@dataclass(frozen=True)
class Binary:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple


def _tokenize(text):
    pos = 0
    out = []
    text = text.rstrip()
    while pos < len(text):
        while text[pos].isspace():
            pos += 1
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise ExpressionError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        out.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text):
        self.text = text
        self.toks = _tokenize(text)
        self.k = 0

    def peek(self):
        return self.toks[self.k]

    def take(self):
        tok = self.toks[self.k]
        self.k += 1
        return tok

    def expect(self, op):
        kind, val, pos = self.take()
        if val != op or kind != "op":
            raise ExpressionError(f"expected {op!r}, found {val or 'end of input'!r}", pos)

    def parse(self):
        node = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ExpressionError(f"unexpected {val!r}", pos)
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = Binary(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = Binary(op, node, self.unary())
        return node

    def unary(self):
        kind, val, _ = self.peek()
        if kind == "op" and val in ("-", "+"):
            self.take()
            arg = self.unary()
            return Unary("-", arg) if val == "-" else arg
        return self.atom()

    def atom(self):
        kind, val, pos = self.take()
        if kind == "num":
            return Num(complex(float(val)))
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect(")")
            return node
        if kind == "name":
            if val in FUNCTIONS:
                self.expect("(")
                args = [self.expr()]
                while self.peek()[1] == ",":
                    self.take()
                    args.append(self.expr())
                self.expect(")")
                if len(args) != FUNCTIONS[val]:
                    raise ExpressionError(
                        f"{val}() takes {FUNCTIONS[val]} argument(s), got {len(args)}", pos)
                return Call(val, tuple(args))
            if val in VARIABLES:
                return Var(val)
            if val in CONSTANTS:
                return Num(complex(CONSTANTS[val]))
            raise ExpressionError(f"unknown name {val!r}", pos)
        raise ExpressionError(f"unexpected {val or 'end of input'!r}", pos)


@dataclass(frozen=True)
class Expr:
    """Parsed expression; call with ``t`` and ``z`` for plain values."""

    text: str
    tree: object

    def __call__(self, t=0.0, z=0.0):
        return _eval(self.tree, {"t": np.asarray(t, dtype=complex), "z": np.asarray(z, dtype=complex)})

    def jet(self, t=0.0, z=0.0, z_jet=None):
        """Second-order jet at (t, z).

        ``z_jet`` substitutes an arbitrary jet for z (used to evaluate in a
        moving frame z = w + a(t)).
        """
        t = np.asarray(t, dtype=complex)
        z = np.asarray(z, dtype=complex)
        shape = np.broadcast_shapes(t.shape, z.shape)
        env = {"t": Jet.variable(np.broadcast_to(t, shape), 0)}
        env["z"] = z_jet if z_jet is not None else Jet.variable(np.broadcast_to(z, shape), 2)
        out = _eval(self.tree, env)
        return out if isinstance(out, Jet) else Jet.const(out, shape)

    @property
    def variables(self):
        return _vars(self.tree)

    def __str__(self):
        return self.text


def parse(text):
    """Parse ``text`` into an :class:`Expr`, raising ExpressionError."""
    if not isinstance(text, str):
        text = repr(float(text)) if np.isreal(text) else str(complex(text))
    if not text.strip():
        raise ExpressionError("empty expression", 0)
    return Expr(text, _Parser(text).parse())


def _vars(node):
    if isinstance(node, Var):
        return {node.name}
    if isinstance(node, Num):
        return set()
    if isinstance(node, Unary):
        return _vars(node.arg)
    if isinstance(node, Binary):
        return _vars(node.left) | _vars(node.right)
    return set().union(*(_vars(a) for a in node.args))


# ---------------------------------------------------------------------------
# jets


def _outer(g1, g2):
    return g1[:, None] * g2[None, :]


class Jet:
    """Complex value with gradient (4, ...) and Hessian (4, 4, ...)."""

    __slots__ = ("v", "g", "h")

    def __init__(self, v, g, h):
        self.v = v
        self.g = g
        self.h = h

    @classmethod
    def const(cls, v, shape=()):
        v = np.broadcast_to(np.asarray(v, dtype=complex), shape).copy()
        return cls(v, np.zeros((4,) + v.shape, complex), np.zeros((4, 4) + v.shape, complex))

    @classmethod
    def variable(cls, v, k):
        """Complex variable whose real part is coordinate k, imag part k + 1."""
        v = np.asarray(v, dtype=complex).copy()
        g = np.zeros((4,) + v.shape, complex)
        g[k] = 1.0
        g[k + 1] = 1j
        return cls(v, g, np.zeros((4, 4) + v.shape, complex))

    # algebra -----------------------------------------------------------------
    def _lift(self, other):
        return other if isinstance(other, Jet) else Jet.const(other, self.v.shape)

    def __add__(self, other):
        o = self._lift(other)
        return Jet(self.v + o.v, self.g + o.g, self.h + o.h)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.v, -self.g, -self.h)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        a, b = self, o
        h = a.v * b.h + b.v * a.h + _outer(a.g, b.g) + _outer(b.g, a.g)
        return Jet(a.v * b.v, a.v * b.g + b.v * a.g, h)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * self._lift(other).reciprocal()

    def __rtruediv__(self, other):
        return self._lift(other) * self.reciprocal()

    def chain(self, f0, f1, f2):
        """Apply a scalar function with derivatives f1, f2 at the value."""
        return Jet(f0, f1 * self.g, f1 * self.h + f2 * _outer(self.g, self.g))

    def reciprocal(self):
        r = 1.0 / self.v
        return self.chain(r, -r * r, 2 * r * r * r)

    def exp(self):
        e = np.exp(self.v)
        return self.chain(e, e, e)

    def log(self):
        r = 1.0 / self.v
        return self.chain(np.log(self.v), r, -r * r)

    def conj(self):
        return Jet(np.conj(self.v), np.conj(self.g), np.conj(self.h))

    def real(self):
        return Jet(self.v.real.astype(complex), self.g.real.astype(complex), self.h.real.astype(complex))

    def imag(self):
        return Jet(self.v.imag.astype(complex), self.g.imag.astype(complex), self.h.imag.astype(complex))

    def power(self, n):
        """x**n for a constant exponent n (exact for non-negative integers)."""
        x = self.v
        n = complex(n)
        if n.imag == 0 and n.real == int(n.real) and n.real >= 0:
            k = int(n.real)
            f0 = x ** k
            f1 = k * x ** (k - 1) if k >= 1 else np.zeros_like(x)
            f2 = k * (k - 1) * x ** (k - 2) if k >= 2 else np.zeros_like(x)
            return self.chain(f0, f1, f2)
        with np.errstate(divide="ignore", invalid="ignore"):
            f0 = x ** n
            return self.chain(f0, n * f0 / x, n * (n - 1) * f0 / (x * x))

    # Wirtinger assembly --------------------------------------------------------
    @property
    def d_t(self):
        return 0.5 * (self.g[0] - 1j * self.g[1])

    @property
    def d_z(self):
        return 0.5 * (self.g[2] - 1j * self.g[3])

    @property
    def d_tbar(self):
        return 0.5 * (self.g[0] + 1j * self.g[1])

    @property
    def d_tt_bar(self):
        return 0.25 * (self.h[0, 0] + self.h[1, 1])

    @property
    def d_zz_bar(self):
        return 0.25 * (self.h[2, 2] + self.h[3, 3])

    @property
    def d_tbar_z(self):
        h = self.h
        return 0.25 * (h[0, 2] - 1j * h[0, 3] + 1j * h[1, 2] + h[1, 3])


def _is_const(j):
    return not (np.any(j.g) or np.any(j.h))


def _eval(node, env):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return env[node.name]
    if isinstance(node, Unary):
        return -_eval(node.arg, env)
    if isinstance(node, Binary):
        left = _eval(node.left, env)
        right = _eval(node.right, env)
        if node.op == "+":
            return left + right
        if node.op == "-":
            return left - right
        if node.op == "*":
            return left * right
        if isinstance(right, Jet) or isinstance(left, Jet):
            return left / right
        return np.divide(left, right)
    args = [_eval(a, env) for a in node.args]
    x = args[0]
    jet = any(isinstance(a, Jet) for a in args)
    f = node.func
    if not jet:
        if f == "conj":
            return np.conj(x)
        if f == "re":
            return np.real(x) + 0j
        if f == "im":
            return np.imag(x) + 0j
        if f == "abs2":
            return np.abs(x) ** 2 + 0j
        if f == "exp":
            return np.exp(x)
        if f == "log":
            return np.log(x + 0j)
        if f == "sqrt":
            return np.sqrt(x + 0j)
        return _power_plain(x, args[1])
    if not isinstance(x, Jet):
        shape = next(a.v.shape for a in args if isinstance(a, Jet))
        x = Jet.const(x, shape)
    if f == "conj":
        return x.conj()
    if f == "re":
        return x.real()
    if f == "im":
        return x.imag()
    if f == "abs2":
        return x * x.conj()
    if f == "exp":
        return x.exp()
    if f == "log":
        return x.log()
    if f == "sqrt":
        return x.power(0.5)
    y = args[1]
    if not isinstance(y, Jet):
        return x.power(y)
    if _is_const(y) and np.all(y.v == y.v.flat[0]):
        return x.power(y.v.flat[0])
    return (y * x.log()).exp()


def _power_plain(x, y):
    y = np.asarray(y, dtype=complex)
    if y.ndim == 0 and y.imag == 0 and y.real == int(y.real) and y.real >= 0:
        return np.asarray(x, dtype=complex) ** int(y.real)
    return np.asarray(x, dtype=complex) ** y
