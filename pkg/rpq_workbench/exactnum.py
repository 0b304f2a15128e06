"""
Exact scalar arithmetic for the workbench.

Scalars are elements of a rational function field over QQ in a fixed,
named variable universe (a ScalarField). Laurent monomials such as q^-1
are represented as fractions, so every preset stays exact.
"""

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Dict, Iterable, List, Mapping, Sequence, Tuple, Union

from sympy.polys.domains import QQ
from sympy.polys.fields import FracElement, FracField

from .errors import ContextMismatch, DivisionByZero, EvaluationAtPole

RationalLike = Union[int, str, Any]
Rule = Union[Tuple[str, int], RationalLike]

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?$")


def parse_rational(value: RationalLike) -> Any:
    """Parse ``"int/int"``, ``"int"`` or an int into a QQ element."""
    if isinstance(value, bool):
        raise ValueError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return QQ(value)
    if isinstance(value, str):
        match = _RATIONAL_RE.match(value)
        if not match:
            raise ValueError(f"not a rational 'int/int' literal: {value!r}")
        den = int(match.group(2)) if match.group(2) else 1
        if den == 0:
            raise DivisionByZero(f"zero denominator in rational literal {value!r}")
        return QQ(int(match.group(1)), den)
    return QQ.convert(value)


@lru_cache(maxsize=None)
def _frac_field(names: Tuple[str, ...]) -> FracField:
    return FracField(names, QQ)


@dataclass(frozen=True)
class ScalarField:
    """A variable universe such as (p, q, c) or (tau1, tau2, c)."""

    names: Tuple[str, ...]

    @property
    def sympy_field(self) -> FracField:
        return _frac_field(self.names)

    def zero(self) -> "Scalar":
        return Scalar(self, self.sympy_field.zero)

    def one(self) -> "Scalar":
        return Scalar(self, self.sympy_field.one)

    def constant(self, value: RationalLike) -> "Scalar":
        return Scalar(self, self.sympy_field.ground_new(parse_rational(value)))

    def gen(self, name: str) -> "Scalar":
        try:
            index = self.names.index(name)
        except ValueError:
            raise ContextMismatch(f"variable '{name}' is not in context {self.names}")
        return Scalar(self, self.sympy_field.gens[index])

    def monomial(self, exponents: Mapping[str, int], coeff: RationalLike = 1) -> "Scalar":
        value = self.constant(coeff)
        for name, power in exponents.items():
            if power:
                value = value * self.gen(name) ** power
        return value


@dataclass(frozen=True, eq=False)
class Scalar:
    context: ScalarField
    value: FracElement

    def _coerce(self, other: Any) -> FracElement:
        if isinstance(other, Scalar):
            if other.context != self.context:
                raise ContextMismatch(
                    f"cannot combine scalars from {self.context.names} and {other.context.names}"
                )
            return other.value
        return self.context.sympy_field.ground_new(parse_rational(other))

    def __add__(self, other: Any) -> "Scalar":
        return Scalar(self.context, self.value + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other: Any) -> "Scalar":
        return Scalar(self.context, self.value - self._coerce(other))

    def __rsub__(self, other: Any) -> "Scalar":
        return Scalar(self.context, self._coerce(other) - self.value)

    def __mul__(self, other: Any) -> "Scalar":
        return Scalar(self.context, self.value * self._coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> "Scalar":
        divisor = self._coerce(other)
        if not divisor:
            raise DivisionByZero(f"division of {self.render()} by zero")
        return Scalar(self.context, self.value / divisor)

    def __rtruediv__(self, other: Any) -> "Scalar":
        if self.is_zero:
            raise DivisionByZero("division by the zero scalar")
        return Scalar(self.context, self._coerce(other) / self.value)

    def __neg__(self) -> "Scalar":
        return Scalar(self.context, -self.value)

    def __pow__(self, exponent: int) -> "Scalar":
        if exponent < 0 and self.is_zero:
            raise DivisionByZero("negative power of the zero scalar")
        return Scalar(self.context, self.value ** exponent)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Scalar):
            if other.context != self.context:
                return False
            a, b = self.value, other.value
            return not (a.numer * b.denom - b.numer * a.denom)
        if isinstance(other, (int, str)):
            return (self - other).is_zero
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.context, self.value))

    @property
    def is_zero(self) -> bool:
        return not self.value.numer

    @property
    def numerator(self) -> "LaurentPoly":
        return LaurentPoly.from_poly(self.context.names, self.value.numer)

    @property
    def denominator(self) -> "LaurentPoly":
        return LaurentPoly.from_poly(self.context.names, self.value.denom)

    def render(self) -> str:
        return render_scalar(self)

    def __str__(self) -> str:
        return self.render()

    def __repr__(self) -> str:
        return f"Scalar({self.render()})"


def scalar_arith(a: Scalar, b: Scalar, op: str) -> Scalar:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    if op == "neg":
        return -a
    raise ValueError(f"unknown scalar operation '{op}'")


def is_zero(a: Scalar) -> bool:
    return a.is_zero


@dataclass(frozen=True)
class LaurentPoly:
    """Sparse Laurent polynomial: exponent vectors -> nonzero QQ coefficients."""

    variables: Tuple[str, ...]
    terms: Tuple[Tuple[Tuple[int, ...], Any], ...]

    @classmethod
    def from_mapping(cls, variables: Sequence[str], terms: Mapping[Tuple[int, ...], Any]) -> "LaurentPoly":
        variables = tuple(variables)
        cleaned: Dict[Tuple[int, ...], Any] = {}
        for exponents, coeff in terms.items():
            if len(exponents) != len(variables):
                raise ValueError(
                    f"exponent vector {list(exponents)} has length {len(exponents)}, expected {len(variables)}"
                )
            total = cleaned.get(tuple(exponents), QQ(0)) + parse_rational(coeff)
            cleaned[tuple(exponents)] = total
        ordered = tuple(sorted(((e, c) for e, c in cleaned.items() if c), reverse=True))
        return cls(variables, ordered)

    @classmethod
    def from_records(cls, variables: Sequence[str], records: Iterable[Mapping[str, Any]]) -> "LaurentPoly":
        merged: Dict[Tuple[int, ...], Any] = {}
        for index, record in enumerate(records):
            if not isinstance(record, Mapping) or "coeff" not in record or "exponents" not in record:
                raise ValueError(f"term {index}: expected {{coeff, exponents}}, got {record!r}")
            exponents = record["exponents"]
            if not isinstance(exponents, list) or not all(
                isinstance(e, int) and not isinstance(e, bool) for e in exponents
            ):
                raise ValueError(f"term {index}: exponents must be a list of integers")
            if len(exponents) != len(variables):
                raise ValueError(
                    f"term {index}: {len(exponents)} exponents given, expected {len(variables)} over {tuple(variables)}"
                )
            key = tuple(exponents)
            merged[key] = merged.get(key, QQ(0)) + parse_rational(record["coeff"])
        return cls.from_mapping(variables, merged)

    @classmethod
    def from_poly(cls, names: Sequence[str], poly: Any) -> "LaurentPoly":
        return cls.from_mapping(names, dict(poly.terms()))

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def to_scalar(self, context: ScalarField) -> Scalar:
        value = context.zero()
        for exponents, coeff in self.terms:
            value = value + context.monomial(dict(zip(self.variables, exponents)), coeff)
        return value

    def render(self) -> str:
        return _render_terms(self.variables, self.terms)


def substitute_powers(a: Scalar, assignment: Mapping[str, Rule], target: ScalarField) -> Scalar:
    """Substitute variables of ``a`` into ``target``.

    A rule ``(name, k)`` maps the variable to ``name**k`` in the target
    context; any other rule is read as a rational value. Variables without a
    rule pass through unchanged when the target has a variable of the same
    name.
    """
    field = target.sympy_field
    images: List[Any] = []
    for name in a.context.names:
        if name in assignment:
            rule = assignment[name]
            if isinstance(rule, tuple):
                var, power = rule
                images.append((target.gen(var).value, power))
            else:
                images.append((field.ground_new(parse_rational(rule)), 1))
        elif name in target.names:
            images.append((target.gen(name).value, 1))
        else:
            images.append(None)

    def image(poly: Any) -> FracElement:
        total = field.zero
        for monom, coeff in poly.iterterms():
            term = field.ground_new(coeff)
            for name, exponent, rule in zip(a.context.names, monom, images):
                if not exponent:
                    continue
                if rule is None:
                    raise ContextMismatch(f"assignment does not cover variable '{name}'")
                base, power = rule
                if not base and exponent * power < 0:
                    raise EvaluationAtPole(f"'{name}' evaluates to 0 under a negative power")
                term = term * base ** (exponent * power)
            total = total + term
        return total

    numerator = image(a.value.numer)
    denominator = image(a.value.denom)
    if not denominator:
        raise EvaluationAtPole(f"denominator of {a.render()} vanishes under the substitution")
    return Scalar(target, numerator / denominator)


def _render_terms(names: Sequence[str], terms: Iterable[Tuple[Tuple[int, ...], Any]]) -> str:
    parts: List[str] = []
    for monom, coeff in terms:
        factors = [name if e == 1 else f"{name}^{e}" for name, e in zip(names, monom) if e]
        negative = coeff < 0
        magnitude = -coeff if negative else coeff
        if factors:
            body = "*".join(factors) if magnitude == 1 else f"{magnitude}*" + "*".join(factors)
        else:
            body = str(magnitude)
        if not parts:
            parts.append(f"-{body}" if negative else body)
        else:
            parts.append(f"- {body}" if negative else f"+ {body}")
    return " ".join(parts) if parts else "0"


def render_scalar(a: Scalar) -> str:
    """Canonical text: sorted monomials, explicit exponents, ``(num)/(den)``."""
    names = a.context.names
    numerator = _render_terms(names, a.value.numer.terms())
    if a.value.denom == 1:
        return numerator
    denominator = _render_terms(names, a.value.denom.terms())
    return f"({numerator})/({denominator})"


PQ = ScalarField(("p", "q", "c"))
TAU = ScalarField(("tau1", "tau2", "c"))
XY = ScalarField(("x", "y", "p", "q"))
