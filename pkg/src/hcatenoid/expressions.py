"""Parser and evaluator for one-variable prescription expressions.

Grammar (whitespace insensitive)::

    expr   := term (('+'|'-') term)*
    term   := unary (('*'|'/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' exponent)?          # right associative
    exponent := '-' exponent | power
    atom   := NUMBER | 'y' | func '(' args ')' | '(' expr ')'
    func   := 'abs' | 'exp' | 'log' | 'sqrt' | 'pow'

`^` binds tighter than unary minus, so ``-y^2`` parses as ``-(y^2)``.
Expression trees support exact symbolic differentiation within this grammar
(``abs`` differentiates to ``sign(u) * u'``, undefined at the kink).
"""

import math

import numpy as np

from .errors import ParseError

_FUNCTIONS_1 = ("abs", "exp", "log", "sqrt")
_FUNCTIONS_2 = ("pow",)


# ---------------------------------------------------------------------------
# AST nodes
# ---------------------------------------------------------------------------

class Node:
    def eval(self, y):
        raise NotImplementedError

    def diff(self):
        raise NotImplementedError


class Num(Node):
    def __init__(self, value):
        self.value = float(value)

    def eval(self, y):
        return self.value

    def diff(self):
        return Num(0.0)

    def __repr__(self):
        return repr(self.value)


class Var(Node):
    def eval(self, y):
        return y

    def diff(self):
        return Num(1.0)

    def __repr__(self):
        return "y"


class Neg(Node):
    def __init__(self, a):
        self.a = a

    def eval(self, y):
        return -self.a.eval(y)

    def diff(self):
        return _neg(self.a.diff())

    def __repr__(self):
        return f"(-{self.a!r})"


class Binary(Node):
    op = "?"

    def __init__(self, a, b):
        self.a = a
        self.b = b

    def __repr__(self):
        return f"({self.a!r} {self.op} {self.b!r})"


class Add(Binary):
    op = "+"

    def eval(self, y):
        return self.a.eval(y) + self.b.eval(y)

    def diff(self):
        return _add(self.a.diff(), self.b.diff())


class Sub(Binary):
    op = "-"

    def eval(self, y):
        return self.a.eval(y) - self.b.eval(y)

    def diff(self):
        return _sub(self.a.diff(), self.b.diff())


class Mul(Binary):
    op = "*"

    def eval(self, y):
        return self.a.eval(y) * self.b.eval(y)

    def diff(self):
        return _add(_mul(self.a.diff(), self.b), _mul(self.a, self.b.diff()))


class Div(Binary):
    op = "/"

    def eval(self, y):
        return self.a.eval(y) / self.b.eval(y)

    def diff(self):
        num = _sub(_mul(self.a.diff(), self.b), _mul(self.a, self.b.diff()))
        return Div(num, Mul(self.b, self.b))


class Pow(Binary):
    op = "^"

    def eval(self, y):
        return self.a.eval(y) ** self.b.eval(y)

    def diff(self):
        a, b = self.a, self.b
        if isinstance(b, Num):
            # b * a^(b-1) * a'
            return _mul(_mul(Num(b.value), Pow(a, Num(b.value - 1.0))), a.diff())
        # a^b * (b' log a + b a'/a)
        term = _add(_mul(b.diff(), Call("log", [a])), _mul(b, Div(a.diff(), a)))
        return _mul(self, term)


class Call(Node):
    def __init__(self, name, args):
        self.name = name
        self.args = args

    def eval(self, y):
        vals = [a.eval(y) for a in self.args]
        scalar = not any(isinstance(v, np.ndarray) for v in vals)
        if self.name == "abs":
            return abs(vals[0])
        if self.name == "exp":
            return math.exp(vals[0]) if scalar else np.exp(vals[0])
        if self.name == "log":
            return math.log(vals[0]) if scalar else np.log(vals[0])
        if self.name == "sqrt":
            return math.sqrt(vals[0]) if scalar else np.sqrt(vals[0])
        if self.name == "sign":
            return math.copysign(1.0, vals[0]) if scalar else np.sign(vals[0])
        if self.name == "pow":
            return vals[0] ** vals[1]
        raise ValueError(f"unknown function {self.name!r}")

    def diff(self):
        if self.name == "abs":
            u = self.args[0]
            return _mul(Call("sign", [u]), u.diff())
        if self.name == "exp":
            u = self.args[0]
            return _mul(self, u.diff())
        if self.name == "log":
            u = self.args[0]
            return Div(u.diff(), u)
        if self.name == "sqrt":
            u = self.args[0]
            return Div(u.diff(), _mul(Num(2.0), self))
        if self.name == "pow":
            return Pow(self.args[0], self.args[1]).diff()
        raise ValueError(f"cannot differentiate {self.name!r}")

    def __repr__(self):
        return f"{self.name}({', '.join(map(repr, self.args))})"


def _is_num(node, value=None):
    return isinstance(node, Num) and (value is None or node.value == value)


def _neg(a):
    if _is_num(a):
        return Num(-a.value)
    return Neg(a)


def _add(a, b):
    if _is_num(a, 0.0):
        return b
    if _is_num(b, 0.0):
        return a
    if _is_num(a) and _is_num(b):
        return Num(a.value + b.value)
    return Add(a, b)


def _sub(a, b):
    if _is_num(b, 0.0):
        return a
    if _is_num(a) and _is_num(b):
        return Num(a.value - b.value)
    return Sub(a, b)


def _mul(a, b):
    if _is_num(a, 0.0) or _is_num(b, 0.0):
        return Num(0.0)
    if _is_num(a, 1.0):
        return b
    if _is_num(b, 1.0):
        return a
    if _is_num(a) and _is_num(b):
        return Num(a.value * b.value)
    return Mul(a, b)


# ---------------------------------------------------------------------------
# Tokenizer
# ---------------------------------------------------------------------------

class _Token:
    __slots__ = ("kind", "text", "pos")

    def __init__(self, kind, text, pos):
        self.kind = kind
        self.text = text
        self.pos = pos


def _tokenize(text):
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit() or (ch == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i
            while j < n and (text[j].isdigit() or text[j] == "."):
                j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k].isdigit():
                    j = k
                    while j < n and text[j].isdigit():
                        j += 1
            try:
                float(text[i:j])
            except ValueError:
                raise ParseError(f"bad number {text[i:j]!r}", i) from None
            tokens.append(_Token("num", text[i:j], i))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(_Token("name", text[i:j], i))
            i = j
            continue
        if ch in "+-*/^(),":
            tokens.append(_Token(ch, ch, i))
            i += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", i)
    tokens.append(_Token("end", "", n))
    return tokens


# ---------------------------------------------------------------------------
# Recursive-descent parser
# ---------------------------------------------------------------------------

class _Parser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.k = 0

    def peek(self):
        return self.tokens[self.k]

    def advance(self):
        tok = self.tokens[self.k]
        self.k += 1
        return tok

    def expect(self, kind):
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(f"expected {kind!r}, found {tok.text or 'end of input'!r}", tok.pos)
        return self.advance()

    def parse(self):
        node = self.expr()
        tok = self.peek()
        if tok.kind != "end":
            raise ParseError(f"unexpected trailing input {tok.text!r}", tok.pos)
        return node

    def expr(self):
        node = self.term()
        while self.peek().kind in ("+", "-"):
            op = self.advance().kind
            rhs = self.term()
            node = Add(node, rhs) if op == "+" else Sub(node, rhs)
        return node

    def term(self):
        node = self.unary()
        while self.peek().kind in ("*", "/"):
            op = self.advance().kind
            rhs = self.unary()
            node = Mul(node, rhs) if op == "*" else Div(node, rhs)
        return node

    def unary(self):
        if self.peek().kind == "-":
            self.advance()
            return _neg(self.unary())
        return self.power()

    def power(self):
        node = self.atom()
        if self.peek().kind == "^":
            self.advance()
            node = Pow(node, self.exponent())
        return node

    def exponent(self):
        # right operand of '^': right associative, allows a leading minus
        if self.peek().kind == "-":
            self.advance()
            return _neg(self.exponent())
        return self.power()

    def atom(self):
        tok = self.peek()
        if tok.kind == "num":
            self.advance()
            return Num(float(tok.text))
        if tok.kind == "name":
            self.advance()
            if tok.text == "y":
                return Var()
            if tok.text in _FUNCTIONS_1 or tok.text in _FUNCTIONS_2:
                self.expect("(")
                args = [self.expr()]
                while self.peek().kind == ",":
                    self.advance()
                    args.append(self.expr())
                self.expect(")")
                want = 2 if tok.text in _FUNCTIONS_2 else 1
                if len(args) != want:
                    raise ParseError(f"{tok.text} takes {want} argument(s)", tok.pos)
                return Call(tok.text, args)
            raise ParseError(f"unknown name {tok.text!r}", tok.pos)
        if tok.kind == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        raise ParseError(f"expected a value, found {tok.text or 'end of input'!r}", tok.pos)


def parse_expression(text):
    """Parse ``text`` into an expression tree over the variable ``y``."""
    return _Parser(text).parse()
