"""Exact arithmetic in Q and in the rational function field Q(n).

Rationals are ``fractions.Fraction``. Polynomials and rational functions
are immutable value objects kept in a canonical form so that equality is
structural: a ``Poly`` never carries trailing zero coefficients and a
``RatFunc`` always has a monic denominator coprime to its numerator.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Optional, Tuple, Union

import sympy
from sympy.parsing.sympy_parser import (
    convert_xor,
    implicit_multiplication,
    parse_expr,
    standard_transformations,
)

VARIABLE = "n"

Number = Union[int, Fraction]


class RatFuncError(ArithmeticError):
    """Raised when an exact rational-function operation is undefined."""


def _trim(coeffs: Iterable[Number]) -> Tuple[Fraction, ...]:
    out = [Fraction(c) for c in coeffs]
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


# ---------- Polynomials ----------


@dataclass(frozen=True)
class Poly:
    """Polynomial in one indeterminate with rational coefficients.

    ``coeffs[i]`` is the coefficient of ``n**i``; the empty tuple is zero.
    """

    coeffs: Tuple[Fraction, ...] = ()

    def __post_init__(self):
        if self.coeffs and self.coeffs[-1] == 0:
            object.__setattr__(self, "coeffs", _trim(self.coeffs))

    @classmethod
    def of(cls, *coeffs: Number) -> "Poly":
        return cls(_trim(coeffs))

    @classmethod
    def constant(cls, value: Number) -> "Poly":
        return cls(_trim((value,)))

    @classmethod
    def monomial(cls, degree: int, value: Number = 1) -> "Poly":
        return cls(_trim([0] * degree + [value]))

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __neg__(self) -> "Poly":
        return Poly(tuple(-c for c in self.coeffs))

    def __add__(self, other: "Poly") -> "Poly":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return Poly(_trim(out))

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return ZERO_POLY
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x == 0:
                continue
            for j, y in enumerate(b):
                out[i + j] += x * y
        return Poly(_trim(out))

    def scale(self, factor: Number) -> "Poly":
        factor = Fraction(factor)
        if factor == 0:
            return ZERO_POLY
        return Poly(tuple(c * factor for c in self.coeffs))

    def __pow__(self, exponent: int) -> "Poly":
        if exponent < 0:
            raise RatFuncError("negative polynomial power")
        result, base = ONE_POLY, self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def divmod(self, divisor: "Poly") -> Tuple["Poly", "Poly"]:
        if divisor.is_zero():
            raise RatFuncError("division by zero polynomial")
        rem = list(self.coeffs)
        d = divisor.coeffs
        lead = d[-1]
        if len(rem) < len(d):
            return ZERO_POLY, self
        quot = [Fraction(0)] * (len(rem) - len(d) + 1)
        for shift in range(len(rem) - len(d), -1, -1):
            factor = rem[shift + len(d) - 1] / lead
            quot[shift] = factor
            if factor:
                for i, c in enumerate(d):
                    rem[shift + i] -= factor * c
        return Poly(_trim(quot)), Poly(_trim(rem[: len(d) - 1]))

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        return self.scale(1 / self.leading)

    def __call__(self, value: Number) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * value + c
        return acc

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for degree in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[degree]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = -c if c < 0 else c
            if degree == 0:
                body = _fraction_text(mag)
            else:
                power = VARIABLE if degree == 1 else f"{VARIABLE}^{degree}"
                body = power if mag == 1 else f"{_fraction_text(mag)}*{power}"
            parts.append((sign, body))
        first_sign, first_body = parts[0]
        text = ("-" if first_sign == "-" else "") + first_body
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text


def _fraction_text(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


ZERO_POLY = Poly(())
ONE_POLY = Poly((Fraction(1),))
X_POLY = Poly((Fraction(0), Fraction(1)))


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic greatest common divisor (Euclid over Q); gcd(0, 0) = 1."""
    while not b.is_zero():
        a, b = b, a.divmod(b)[1]
    if a.is_zero():
        return ONE_POLY
    return a.monic()


# ---------- Rational functions ----------


@dataclass(frozen=True)
class RatFunc:
    """Normalized quotient num/den: den monic, gcd(num, den) = 1, zero is 0/1.

    Build values through ``ratfunc_normalize`` or the helpers below; the
    dataclass constructor trusts its arguments.
    """

    num: Poly
    den: Poly = ONE_POLY

    # ----- Constructors -----

    @classmethod
    def const(cls, value: Number) -> "RatFunc":
        return cls(Poly.constant(value), ONE_POLY)

    @classmethod
    def poly(cls, p: Poly) -> "RatFunc":
        return cls(p, ONE_POLY)

    @classmethod
    def parse(cls, text: str) -> "RatFunc":
        return ratfunc_parse(text)

    # ----- Predicates -----

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self) -> bool:
        return not self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den == ONE_POLY

    def is_constant(self) -> bool:
        return self.is_polynomial() and self.num.is_constant()

    # ----- Arithmetic -----

    def __neg__(self) -> "RatFunc":
        return RatFunc(-self.num, self.den)

    def __add__(self, other: Union["RatFunc", Number]) -> "RatFunc":
        other = _coerce(other)
        if self.den == other.den:
            return ratfunc_normalize(self.num + other.num, self.den)
        return ratfunc_normalize(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __sub__(self, other: Union["RatFunc", Number]) -> "RatFunc":
        return self + (-_coerce(other))

    def __rsub__(self, other: Number) -> "RatFunc":
        return _coerce(other) - self

    def __mul__(self, other: Union["RatFunc", Number]) -> "RatFunc":
        other = _coerce(other)
        if self.is_zero() or other.is_zero():
            return ZERO
        return ratfunc_normalize(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other: Union["RatFunc", Number]) -> "RatFunc":
        other = _coerce(other)
        if other.is_zero():
            raise RatFuncError("division by zero")
        return ratfunc_normalize(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other: Number) -> "RatFunc":
        return _coerce(other) / self

    def __pow__(self, exponent: int) -> "RatFunc":
        if exponent < 0:
            if self.is_zero():
                raise RatFuncError("division by zero")
            return (RatFunc(self.den, ONE_POLY) / RatFunc(self.num, ONE_POLY)) ** (-exponent)
        return ratfunc_normalize(self.num ** exponent, self.den ** exponent)

    # ----- Evaluation and limits -----

    def __call__(self, value: Number) -> Fraction:
        return ratfunc_eval(self, value)

    def limit_at_infinity(self) -> Optional[Fraction]:
        """Limit as n -> infinity, or None when the function diverges."""
        if self.num.degree < self.den.degree:
            return Fraction(0)
        if self.num.degree == self.den.degree:
            return self.num.leading / self.den.leading
        return None

    # ----- Text -----

    def __str__(self) -> str:
        if self.den == ONE_POLY:
            return str(self.num)
        return f"({self.num})/({self.den})"

    def compact(self) -> str:
        """Space-free rendering, parenthesized unless it is a single token."""
        text = str(self).replace(" ", "")
        if not self.is_polynomial():
            return text
        if self.is_constant() and self.num.leading.denominator == 1:
            return text
        if self.is_polynomial() and len([c for c in self.num.coeffs if c]) == 1 and not text.startswith("-"):
            return text
        return f"({text})"


def _coerce(value: Union[RatFunc, Number]) -> RatFunc:
    if isinstance(value, RatFunc):
        return value
    if isinstance(value, (int, Fraction)):
        return RatFunc.const(value)
    raise TypeError(f"cannot use {type(value).__name__} as a rational function")


ZERO = RatFunc(ZERO_POLY, ONE_POLY)
ONE = RatFunc(ONE_POLY, ONE_POLY)
N = RatFunc(X_POLY, ONE_POLY)


# ---------- Public API ----------


def ratfunc_normalize(num: Poly, den: Poly) -> RatFunc:
    """Return num/den in canonical form.

    Args:
        num: Numerator polynomial.
        den: Denominator polynomial; must be nonzero.

    Returns:
        The equal ``RatFunc`` with monic denominator coprime to the numerator.

    Raises:
        RatFuncError: "zero denominator" when ``den`` is zero.
    """
    if den.is_zero():
        raise RatFuncError("zero denominator")
    if num.is_zero():
        return ZERO
    if den.degree > 0:
        g = poly_gcd(num, den)
        if g.degree > 0:
            num = num.divmod(g)[0]
            den = den.divmod(g)[0]
    lead = den.leading
    if lead != 1:
        num = num.scale(1 / lead)
        den = den.scale(1 / lead)
    return RatFunc(num, den)


_ARITH = {
    "add": RatFunc.__add__,
    "sub": RatFunc.__sub__,
    "mul": RatFunc.__mul__,
    "div": RatFunc.__truediv__,
}


def ratfunc_arith(a: RatFunc, b: RatFunc, op: str) -> RatFunc:
    """Apply ``op`` in {"add", "sub", "mul", "div"} to a and b."""
    try:
        fn = _ARITH[op]
    except KeyError:
        raise RatFuncError(f"unknown operation: {op}") from None
    return fn(a, b)


def ratfunc_eval(f: RatFunc, n: Number) -> Fraction:
    """Exact value of f at the integer (or rational) point n."""
    den = f.den(n)
    if den == 0:
        raise RatFuncError(f"pole at evaluation point n={n}")
    return f.num(n) / den


def ratfunc_sum(terms: Iterable[Tuple[Poly, Poly]]) -> RatFunc:
    """Sum of unnormalized fractions num/den.

    Numerators sharing a denominator are added before any gcd work, which
    keeps long accumulations (products of expansions) cheap.
    """
    groups: Dict[Poly, Poly] = {}
    for num, den in terms:
        if num.is_zero():
            continue
        groups[den] = groups.get(den, ZERO_POLY) + num
    total = ZERO
    for den, num in groups.items():
        if not num.is_zero():
            total = total + ratfunc_normalize(num, den)
    return total


_TRANSFORMS = standard_transformations + (convert_xor, implicit_multiplication)
_SYMBOL = sympy.Symbol(VARIABLE)


def ratfunc_parse(text: str) -> RatFunc:
    """Parse the textual form produced by ``str(RatFunc)``.

    Accepts integers, rationals, the variable ``n`` (``x`` is an alias),
    ``+ - * / ^`` and parentheses.
    """
    try:
        expr = parse_expr(
            text,
            local_dict={VARIABLE: _SYMBOL, "x": _SYMBOL},
            transformations=_TRANSFORMS,
            evaluate=True,
        )
        expr = sympy.cancel(sympy.together(expr))
        num_expr, den_expr = sympy.fraction(expr)
        num = _from_sympy(num_expr)
        den = _from_sympy(den_expr)
    except RatFuncError:
        raise
    except Exception as exc:
        raise RatFuncError(f"cannot parse rational function {text!r}: {exc}") from exc
    return ratfunc_normalize(num, den)


def _from_sympy(expr) -> Poly:
    poly = sympy.Poly(expr, _SYMBOL)
    if any(s != _SYMBOL for s in poly.free_symbols):
        raise RatFuncError(f"unexpected symbol in {expr}")
    coeffs = []
    for c in reversed(poly.all_coeffs()):
        c = sympy.Rational(c)
        coeffs.append(Fraction(int(c.p), int(c.q)))
    return Poly(_trim(coeffs))


def to_sympy(f: RatFunc):
    """The same function as a sympy expression in ``n``."""
    num = sum(sympy.Rational(c.numerator, c.denominator) * _SYMBOL ** i for i, c in enumerate(f.num.coeffs))
    den = sum(sympy.Rational(c.numerator, c.denominator) * _SYMBOL ** i for i, c in enumerate(f.den.coeffs))
    return num / den


def n_power(exponent: int) -> RatFunc:
    """n**exponent for any integer exponent."""
    if exponent >= 0:
        return RatFunc(Poly.monomial(exponent), ONE_POLY)
    return RatFunc(ONE_POLY, Poly.monomial(-exponent))
