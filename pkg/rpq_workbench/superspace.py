"""
The super-commutative algebra B = B0 + theta*B0 with B0 the Laurent
polynomials in t, and the maps sigma, d_t, d_theta and Delta acting on it.
"""

from dataclasses import dataclass, field
from typing import Dict, Iterable, Mapping, Optional, Tuple

from .deformation import Deformation, bracket_number
from .exactnum import PQ, Scalar, ScalarField

Coefficients = Dict[int, Scalar]


def _clean(terms: Mapping[int, Scalar]) -> Coefficients:
    return {n: c for n, c in sorted(terms.items()) if not c.is_zero}


@dataclass(frozen=True)
class SuperElement:
    context: ScalarField = PQ
    even: Coefficients = field(default_factory=dict)
    odd: Coefficients = field(default_factory=dict)

    @classmethod
    def of(cls, even: Optional[Mapping[int, Scalar]] = None, odd: Optional[Mapping[int, Scalar]] = None,
           context: ScalarField = PQ) -> "SuperElement":
        return cls(context, _clean(even or {}), _clean(odd or {}))

    @classmethod
    def basis(cls, n: int, odd: bool = False, context: ScalarField = PQ) -> "SuperElement":
        one = {n: context.one()}
        return cls.of(odd=one, context=context) if odd else cls.of(even=one, context=context)

    @classmethod
    def zero(cls, context: ScalarField = PQ) -> "SuperElement":
        return cls(context)

    @property
    def is_zero(self) -> bool:
        return not self.even and not self.odd

    @property
    def parity(self) -> Optional[int]:
        """0 or 1 for a homogeneous element, None for zero or mixed."""
        if self.even and not self.odd:
            return 0
        if self.odd and not self.even:
            return 1
        return None

    def monomials(self) -> Iterable[Tuple[int, bool, Scalar]]:
        for n, c in self.even.items():
            yield n, False, c
        for n, c in self.odd.items():
            yield n, True, c

    def __add__(self, other: "SuperElement") -> "SuperElement":
        even = dict(self.even)
        for n, c in other.even.items():
            even[n] = even[n] + c if n in even else c
        odd = dict(self.odd)
        for n, c in other.odd.items():
            odd[n] = odd[n] + c if n in odd else c
        return SuperElement.of(even, odd, self.context)

    def __sub__(self, other: "SuperElement") -> "SuperElement":
        return self + other.scale(-1)

    def scale(self, factor: object) -> "SuperElement":
        return SuperElement.of(
            {n: c * factor for n, c in self.even.items()},
            {n: c * factor for n, c in self.odd.items()},
            self.context,
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SuperElement):
            return NotImplemented
        return (self - other).is_zero

    __hash__ = None  # type: ignore[assignment]

    def render(self) -> str:
        return render(self)


def render(a: SuperElement) -> str:
    """Text form ``sum c_n t^n + theta*(sum d_n t^n)``."""
    if a.is_zero:
        return "0"
    even = " + ".join(f"({c.render()})*t^{n}" for n, c in a.even.items())
    odd = " + ".join(f"({c.render()})*t^{n}" for n, c in a.odd.items())
    if not odd:
        return even
    odd_text = f"theta*({odd})"
    return f"{even} + {odd_text}" if even else odd_text


def super_mul(a: SuperElement, b: SuperElement) -> SuperElement:
    even: Coefficients = {}
    odd: Coefficients = {}

    def accumulate(target: Coefficients, n: int, c: Scalar) -> None:
        target[n] = target[n] + c if n in target else c

    for i, ci in a.even.items():
        for j, cj in b.even.items():
            accumulate(even, i + j, ci * cj)
        for j, cj in b.odd.items():
            accumulate(odd, i + j, ci * cj)
    for i, ci in a.odd.items():
        for j, cj in b.even.items():
            accumulate(odd, i + j, ci * cj)
    return SuperElement.of(even, odd, a.context)


def sigma(d: Deformation, a: SuperElement) -> SuperElement:
    return SuperElement.of(
        {n: c * d.phi ** n for n, c in a.even.items()},
        {n: c * d.phi ** (n + 1) for n, c in a.odd.items()},
        a.context,
    )


def dt(d: Deformation, a: SuperElement) -> SuperElement:
    return SuperElement.of(
        {n: c * bracket_number(d, n) for n, c in a.even.items()},
        {n: c * bracket_number(d, n) for n, c in a.odd.items()},
        a.context,
    )


def dtheta(d: Deformation, a: SuperElement) -> SuperElement:
    return SuperElement.of({n: c * d.phi ** n for n, c in a.odd.items()}, None, a.context)


def delta(d: Deformation, a: SuperElement) -> SuperElement:
    return SuperElement.of(
        {n: c * bracket_number(d, n) for n, c in a.even.items()},
        {n: c * (bracket_number(d, n) + d.phi ** n) for n, c in a.odd.items()},
        a.context,
    )


THETA = SuperElement.basis(0, odd=True)


def sigma_derivation_residual(d: Deformation, a: SuperElement, b: SuperElement) -> SuperElement:
    """Delta(ab) - Delta(a) b - sigma(a) Delta(b)."""
    return delta(d, super_mul(a, b)) - super_mul(delta(d, a), b) - super_mul(sigma(d, a), delta(d, b))


def check_sigma_derivation(d: Deformation, a: SuperElement, b: SuperElement) -> bool:
    return sigma_derivation_residual(d, a, b).is_zero


def check_delta_decomposition(d: Deformation, a: SuperElement) -> bool:
    """Delta = d_t + theta d_theta on ``a``."""
    return delta(d, a) == dt(d, a) + super_mul(THETA, dtheta(d, a))


def check_sigma_endomorphism(d: Deformation, a: SuperElement, b: SuperElement) -> bool:
    return sigma(d, super_mul(a, b)) == super_mul(sigma(d, a), sigma(d, b))
