"""Rational functions of model parameters and the expression grammar.

    expr     := term (("+" | "-") term)*
    term     := unary (("*" | "/") unary)*
    unary    := ("+" | "-") unary | power
    power    := atom [("^" | "**") exponent]
    exponent := ["-"] INTEGER | "(" ["-"] INTEGER ")"
    atom     := INTEGER | NAME | "(" expr ")"

NAME must be a parameter of the model (a21, a01, a10_2, ...). Powers bind
tighter than unary minus, so -a01^2 is -(a01^2).
"""

from __future__ import annotations

import re
from collections.abc import Sequence
from dataclasses import dataclass

from identifiability.exceptions import ExpressionError, UnknownParameter
from identifiability.polyring import PRIME, MPoly

TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>\*\*|[-+*/^()·−]))")


@dataclass(frozen=True)
class RationalFunction:
    numerator: MPoly
    denominator: MPoly
    text: str = ""

    @classmethod
    def of(cls, poly: MPoly, text: str = "") -> RationalFunction:
        return cls(poly, MPoly.one(poly.nvars), text)

    def __add__(self, other: RationalFunction) -> RationalFunction:
        if self.denominator == other.denominator:
            return RationalFunction(self.numerator + other.numerator, self.denominator)
        return RationalFunction(
            self.numerator * other.denominator + other.numerator * self.denominator,
            self.denominator * other.denominator,
        )

    def __neg__(self) -> RationalFunction:
        return RationalFunction(-self.numerator, self.denominator)

    def __sub__(self, other: RationalFunction) -> RationalFunction:
        return self + (-other)

    def __mul__(self, other: RationalFunction) -> RationalFunction:
        return RationalFunction(
            self.numerator * other.numerator, self.denominator * other.denominator
        )

    def __truediv__(self, other: RationalFunction) -> RationalFunction:
        if other.numerator.is_zero():
            msg = "division by an expression that is identically zero"
            raise ExpressionError(msg)
        return RationalFunction(
            self.numerator * other.denominator, self.denominator * other.numerator
        )

    def __pow__(self, k: int) -> RationalFunction:
        if k < 0:
            if self.numerator.is_zero():
                msg = "zero raised to a negative power"
                raise ExpressionError(msg)
            return RationalFunction(self.denominator**-k, self.numerator**-k)
        return RationalFunction(self.numerator**k, self.denominator**k)

    def with_text(self, text: str) -> RationalFunction:
        return RationalFunction(self.numerator, self.denominator, text)

    def is_polynomial(self) -> bool:
        return self.denominator == 1

    def gradient_mod(self, values: Sequence[int], p: int = PRIME) -> list[int] | None:
        """Gradient at a point by the quotient rule; None if the denominator vanishes."""
        den = self.denominator.evaluate_mod(values, p)
        if not den:
            return None
        num = self.numerator.evaluate_mod(values, p)
        scale = pow(den * den, -1, p)
        gradient = []
        for i in range(self.numerator.nvars):
            dn = self.numerator.derivative(i).evaluate_mod(values, p)
            dd = self.denominator.derivative(i).evaluate_mod(values, p)
            gradient.append((dn * den - num * dd) * scale % p)
        return gradient

    def format(self, names: Sequence[str]) -> str:
        if self.text:
            return self.text
        if self.is_polynomial():
            return self.numerator.format(names)
        return f"({self.numerator.format(names)})/({self.denominator.format(names)})"


class _Parser:
    def __init__(self, text: str, names: Sequence[str]):
        self.text = text
        self.names = {name: i for i, name in enumerate(names)}
        self.nvars = len(names)
        self.tokens = self._tokenize(text)
        self.position = 0

    def _tokenize(self, text: str) -> list[tuple[str, str]]:
        tokens = []
        index = 0
        stripped = text.rstrip()
        while index < len(stripped):
            match = TOKEN.match(stripped, index)
            if not match:
                msg = f"unexpected character {stripped[index:].lstrip()[:1]!r} at offset {index} in {text!r}"
                raise ExpressionError(msg)
            kind = match.lastgroup or "op"
            value = match.group(kind)
            if value == "·":
                value = "*"
            elif value == "−":
                value = "-"
            tokens.append((kind, value))
            index = match.end()
        return tokens

    def _peek(self) -> str | None:
        if self.position < len(self.tokens):
            return self.tokens[self.position][1]
        return None

    def _next(self) -> tuple[str, str]:
        if self.position >= len(self.tokens):
            msg = f"unexpected end of expression {self.text!r}"
            raise ExpressionError(msg)
        token = self.tokens[self.position]
        self.position += 1
        return token

    def _expect(self, value: str) -> None:
        _, got = self._next()
        if got != value:
            msg = f"expected {value!r} but found {got!r} in {self.text!r}"
            raise ExpressionError(msg)

    def parse(self) -> RationalFunction:
        if not self.tokens:
            msg = "empty expression"
            raise ExpressionError(msg)
        result = self._expr()
        if self.position != len(self.tokens):
            msg = f"unexpected {self._peek()!r} in {self.text!r}"
            raise ExpressionError(msg)
        return result.with_text(self.text.strip())

    def _expr(self) -> RationalFunction:
        result = self._term()
        while self._peek() in ("+", "-"):
            _, op = self._next()
            right = self._term()
            result = result + right if op == "+" else result - right
        return result

    def _term(self) -> RationalFunction:
        result = self._unary()
        while self._peek() in ("*", "/"):
            _, op = self._next()
            right = self._unary()
            result = result * right if op == "*" else result / right
        return result

    def _unary(self) -> RationalFunction:
        if self._peek() in ("+", "-"):
            _, op = self._next()
            operand = self._unary()
            return -operand if op == "-" else operand
        return self._power()

    def _power(self) -> RationalFunction:
        base = self._atom()
        if self._peek() in ("^", "**"):
            self._next()
            return base ** self._exponent()
        return base

    def _exponent(self) -> int:
        parenthesized = self._peek() == "("
        if parenthesized:
            self._next()
        sign = 1
        if self._peek() in ("-", "+"):
            _, op = self._next()
            sign = -1 if op == "-" else 1
        kind, value = self._next()
        if kind != "int":
            msg = f"exponent must be an integer, found {value!r} in {self.text!r}"
            raise ExpressionError(msg)
        if parenthesized:
            self._expect(")")
        return sign * int(value)

    def _atom(self) -> RationalFunction:
        kind, value = self._next()
        if kind == "int":
            return RationalFunction.of(MPoly.constant(int(value), self.nvars))
        if kind == "name":
            if value not in self.names:
                known = ", ".join(self.names) or "none"
                msg = f"{value!r} is not a parameter of this model (known: {known})"
                raise UnknownParameter(msg)
            return RationalFunction.of(MPoly.variable(self.names[value], self.nvars))
        if value == "(":
            inner = self._expr()
            self._expect(")")
            return inner
        msg = f"unexpected {value!r} in {self.text!r}"
        raise ExpressionError(msg)


def parse_expression(text: str, names: Sequence[str]) -> RationalFunction:
    return _Parser(text, names).parse()
