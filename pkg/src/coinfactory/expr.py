"""Tiny expression language for rational functions of the coin bias.

Grammar::

    expr   := ['-'] term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := base ('^' uint)?
    base   := uint | var | '(' expr ')'

Variables are ``p`` for the one-coin case and ``p1`` ... ``ps`` for dice;
``p`` doubles as ``p1`` when two letters are in play.  The optional
leading minus is there so that printed canonical forms such as
"(-p + 1)/2" read back in.  Lowering is exact: every node becomes a
rational-function operation, so parse followed by print followed by
parse is the identity on canonical forms.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ExpressionError
from .multivar import MultiRational
from .ratfunc import RationalFunction

_TOKEN = re.compile(r"\s*(?:(\d+)|(p\d*)|([-+*/^()]))")


@dataclass(frozen=True)
class Token:
    kind: str  # "int", "var", or the operator character itself
    text: str
    position: int


def _tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if match is None:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            at = len(text) - len(stripped)
            raise ExpressionError(f"unexpected character {stripped[0]!r}", at)
        number, name, op = match.groups()
        start = match.end() - len(match.group().lstrip())
        if number is not None:
            tokens.append(Token("int", number, start))
        elif name is not None:
            tokens.append(Token("var", name, start))
        else:
            tokens.append(Token(op, op, start))
        pos = match.end()
    return tokens


class _Parser:
    """Recursive descent over the token list; values are built directly
    in exact rational-function arithmetic supplied by the caller."""

    def __init__(self, text: str, ops):
        self.text = text
        self.tokens = _tokenize(text)
        self.index = 0
        self.ops = ops  # (constant, variable, length) hooks

    def peek(self) -> Token | None:
        return self.tokens[self.index] if self.index < len(self.tokens) else None

    def take(self) -> Token:
        token = self.peek()
        if token is None:
            raise ExpressionError("unexpected end of expression", len(self.text))
        self.index += 1
        return token

    def expect(self, kind: str) -> Token:
        token = self.peek()
        if token is None or token.kind != kind:
            at = token.position if token else len(self.text)
            raise ExpressionError(f"expected {kind!r}", at)
        return self.take()

    def parse(self):
        if not self.tokens:
            raise ExpressionError("empty expression", 0)
        value = self.expr()
        trailing = self.peek()
        if trailing is not None:
            raise ExpressionError("trailing input", trailing.position)
        return value

    def expr(self):
        token = self.peek()
        if token is not None and token.kind == "-":
            self.take()
            value = -self.term()
        else:
            value = self.term()
        while (token := self.peek()) is not None and token.kind in "+-":
            self.take()
            rhs = self.term()
            value = value + rhs if token.kind == "+" else value - rhs
        return value

    def term(self):
        value = self.factor()
        while (token := self.peek()) is not None and token.kind in "*/":
            self.take()
            rhs = self.factor()
            value = value * rhs if token.kind == "*" else value / rhs
        return value

    def factor(self):
        value = self.base()
        token = self.peek()
        if token is not None and token.kind == "^":
            self.take()
            exponent = self.expect("int")
            value = value ** int(exponent.text)
        return value

    def base(self):
        token = self.take()
        constant, variable, _ = self.ops
        if token.kind == "int":
            return constant(int(token.text))
        if token.kind == "var":
            return variable(token)
        if token.kind == "(":
            value = self.expr()
            self.expect(")")
            return value
        raise ExpressionError(f"unexpected {token.text!r}", token.position)


def parse_rational(text: str) -> RationalFunction:
    """Parse an expression in the single variable p, exactly."""

    def variable(token: Token) -> RationalFunction:
        if token.text != "p":
            raise ExpressionError(
                f"unknown variable {token.text!r}; only p here", token.position
            )
        return RationalFunction.var()

    def constant(n: int) -> RationalFunction:
        return RationalFunction.of((n,))

    return _Parser(text, (constant, variable, None)).parse()


def parse_multirational(text: str, s: int) -> MultiRational:
    """Parse an expression over letter probabilities p1..ps.

    Variable pK is the probability of face K, that is of letter K-1.
    Plain p is accepted when s == 2 and means the letter-1 probability,
    matching the one-coin convention, so binary expressions need no
    rewriting.
    """

    def variable(token: Token) -> MultiRational:
        if token.text == "p":
            if s != 2:
                raise ExpressionError(
                    "plain p needs a two-letter alphabet; use p1..p"
                    f"{s}", token.position
                )
            return MultiRational.from_letter(s, 1)
        index = int(token.text[1:])
        if not 1 <= index <= s:
            raise ExpressionError(
                f"variable {token.text!r} outside p1..p{s}", token.position
            )
        return MultiRational.from_letter(s, index - 1)

    def constant(n: int) -> MultiRational:
        return MultiRational.constant(s, n)

    return _Parser(text, (constant, variable, None)).parse()
