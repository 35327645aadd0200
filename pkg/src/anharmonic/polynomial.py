"""Dense univariate polynomials with real coefficients.

Coefficients are stored lowest degree first, so ``coefficients[i]`` multiplies
``x**i``. Every constructor canonicalizes by trimming trailing coefficients
that are exactly zero; tiny nonzero values are kept on purpose.
"""

from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

__all__ = [
    "Parity",
    "Polynomial",
    "PolynomialParseError",
    "parse_potential",
    "multiply",
    "differentiate",
    "evaluate",
    "parity",
]

ZERO_DEGREE = -1  # degree reported for the zero polynomial


class Parity(enum.Enum):
    EVEN = "even"
    ODD = "odd"
    NONE = "none"


def _canonical(coefficients: Iterable[float]) -> tuple:
    coeffs = [float(c) for c in coefficients]
    while coeffs and coeffs[-1] == 0.0:
        coeffs.pop()
    return tuple(coeffs)


@dataclass(frozen=True, init=False)
class Polynomial:
    """Immutable dense polynomial ``sum(c[i] * x**i)``."""

    coefficients: tuple

    def __init__(self, coefficients: Iterable[float] = ()):
        coeffs = _canonical(coefficients)
        if not all(np.isfinite(coeffs)):
            raise ValueError("polynomial coefficients must be finite")
        object.__setattr__(self, "coefficients", coeffs)

    @classmethod
    def zero(cls) -> "Polynomial":
        return cls(())

    @classmethod
    def monomial(cls, degree: int, coefficient: float = 1.0) -> "Polynomial":
        if degree < 0:
            raise ValueError("monomial degree must be non-negative")
        return cls([0.0] * degree + [coefficient])

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1 if self.coefficients else ZERO_DEGREE

    def is_zero(self) -> bool:
        return not self.coefficients

    def is_confining(self) -> bool:
        """Even degree >= 2 with a positive leading coefficient, so V -> +inf both ways."""
        return self.degree >= 2 and self.degree % 2 == 0 and self.coefficients[-1] > 0

    def coefficient(self, degree: int) -> float:
        """Coefficient of ``x**degree`` (0.0 beyond the stored range)."""
        if 0 <= degree < len(self.coefficients):
            return self.coefficients[degree]
        return 0.0

    def as_array(self, length: int | None = None) -> np.ndarray:
        arr = np.array(self.coefficients, dtype=float)
        if length is not None:
            if length < arr.size:
                raise ValueError("requested length shorter than the polynomial")
            arr = np.pad(arr, (0, length - arr.size))
        return arr

    def __call__(self, x):
        return evaluate(self, x)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        other = _coerce(other)
        n = max(len(self.coefficients), len(other.coefficients))
        return Polynomial(self.as_array(n) + other.as_array(n))

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial([-c for c in self.coefficients])

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "Polynomial":
        return _coerce(other) - self

    def __mul__(self, other) -> "Polynomial":
        return multiply(self, _coerce(other))

    __rmul__ = __mul__

    def derivative(self) -> "Polynomial":
        return differentiate(self)

    def parity(self) -> Parity:
        return parity(self)

    def render(self) -> str:
        """Expression string accepted by :func:`parse_potential`."""
        if self.is_zero():
            return "0"
        parts = []
        for k, c in enumerate(self.coefficients):
            if c == 0.0:
                continue
            sign = "-" if c < 0 else "+"
            mag = repr(abs(c))
            if k == 0:
                body = mag
            elif k == 1:
                body = f"{mag}*x"
            else:
                body = f"{mag}*x^{k}"
            parts.append((sign, body))
        first_sign, first_body = parts[0]
        out = ("-" if first_sign == "-" else "") + first_body
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __str__(self) -> str:
        return self.render()

    def to_json(self) -> str:
        return json.dumps(list(self.coefficients))

    @classmethod
    def from_json(cls, text: str) -> "Polynomial":
        data = json.loads(text)
        if not isinstance(data, list):
            raise ValueError("expected a JSON array of coefficients")
        return cls(data)


def _coerce(value: Union[Polynomial, float, int]) -> Polynomial:
    if isinstance(value, Polynomial):
        return value
    if isinstance(value, (int, float, np.floating, np.integer)):
        return Polynomial([float(value)])
    return NotImplemented


def multiply(p: Polynomial, q: Polynomial) -> Polynomial:
    """Exact coefficient convolution of ``p`` and ``q``."""
    if p.is_zero() or q.is_zero():
        return Polynomial.zero()
    return Polynomial(np.convolve(p.as_array(), q.as_array()))


def differentiate(p: Polynomial) -> Polynomial:
    if p.degree < 1:
        return Polynomial.zero()
    c = p.as_array()
    return Polynomial(c[1:] * np.arange(1, c.size))


def evaluate(p: Polynomial, x):
    """Horner evaluation; ``x`` may be a scalar or a numpy array."""
    result = np.zeros_like(np.asarray(x, dtype=float)) if np.ndim(x) else 0.0
    for c in reversed(p.coefficients):
        result = result * x + c
    return result


def parity(p: Polynomial) -> Parity:
    odd = any(c != 0.0 for c in p.coefficients[1::2])
    even = any(c != 0.0 for c in p.coefficients[0::2])
    if not odd:
        return Parity.EVEN
    if not even:
        return Parity.ODD
    return Parity.NONE


# ---------------------------------------------------------------------------
# expression parser
#
#   expr  := term (("+"|"-") term)*
#   term  := ["-"] (coeff ["*"] var | coeff | var)
#   var   := "x" ["^" uint]
#   coeff := decimal literal (optional exponent part, e.g. 2.5e-3)


class PolynomialParseError(ValueError):
    """Malformed potential expression; ``position`` is a 0-based offset."""

    def __init__(self, message: str, text: str, position: int):
        self.text = text
        self.position = position
        caret = " " * position + "^"
        super().__init__(f"{message} at position {position}\n  {text}\n  {caret}")


_NUMBER = re.compile(r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
_EXPONENT = re.compile(r"[+-]?\d*\.?\d*(?:[eE][+-]?\d+)?")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str, position: int | None = None):
        raise PolynomialParseError(message, self.text, self.pos if position is None else position)

    def skip(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def parse(self) -> Polynomial:
        if not self.text.strip():
            self.error("empty expression", 0)
        terms: dict[int, float] = {}
        sign = 1.0
        while True:
            coeff, power = self.term()
            terms[power] = terms.get(power, 0.0) + sign * coeff
            ch = self.peek()
            if ch == "":
                break
            if ch not in "+-":
                self.error(f"unexpected character {ch!r}")
            sign = 1.0 if ch == "+" else -1.0
            self.pos += 1
        coeffs = [0.0] * (max(terms) + 1)
        for power, c in terms.items():
            coeffs[power] = c
        return Polynomial(coeffs)

    def term(self) -> tuple[float, int]:
        sign = 1.0
        if self.peek() == "-":
            sign = -1.0
            self.pos += 1
        elif self.peek() == "+":
            self.pos += 1
        ch = self.peek()
        if ch == "":
            self.error("expected a term")
        if ch == "x":
            return sign, self.var()
        m = _NUMBER.match(self.text, self.pos)
        if not m:
            self.error(f"unexpected character {ch!r}")
        self.pos = m.end()
        coeff = sign * float(m.group())
        if self.peek() == "*":
            self.pos += 1
            if self.peek() != "x":
                self.error("expected 'x' after '*'")
            return coeff, self.var()
        if self.peek() == "x":
            return coeff, self.var()
        return coeff, 0

    def var(self) -> int:
        self.skip()
        self.pos += 1  # the 'x'
        if self.peek() != "^":
            return 1
        self.pos += 1
        self.skip()
        start = self.pos
        m = _EXPONENT.match(self.text, self.pos)
        literal = m.group() if m else ""
        if not literal or literal in "+-":
            self.error("expected an exponent after '^'", start)
        self.pos = m.end()
        if not re.fullmatch(r"\+?\d+", literal):
            try:
                value = float(literal)
            except ValueError:
                self.error(f"malformed exponent {literal!r}", start)
            if value < 0:
                self.error(f"negative exponent {literal!r}", start)
            self.error(f"non-integer exponent {literal!r}", start)
        return int(literal)


def parse_potential(text: str) -> Polynomial:
    """Parse an expression such as ``"x^4 - 5*x^2"`` into a :class:`Polynomial`.

    Raises
    ------
    PolynomialParseError
        On empty input, bad syntax, or a negative / non-integer exponent.
    """
    return _Parser(text).parse()
