"""
Parity-graded linear operators on B.

An operator is a linear combination of words over the primitives MulT(k),
MulTheta, Delta, Sigma, DT and DTheta. Words apply right to left, so the
word (MulT(m), Delta) is t^m * Delta. Every primitive sends a basis element
t^n or theta*t^n to a multiple of one basis element, which is all the
evaluation below relies on.
"""

from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .deformation import Deformation, bracket_number
from .errors import ContextMismatch, MixedParity
from .exactnum import PQ, Scalar
from .superspace import SuperElement

DEFAULT_WINDOW = 8


@dataclass(frozen=True)
class MulT:
    k: int


@dataclass(frozen=True)
class MulTheta:
    pass


@dataclass(frozen=True)
class Delta:
    pass


@dataclass(frozen=True)
class Sigma:
    pass


@dataclass(frozen=True)
class DT:
    pass


@dataclass(frozen=True)
class DTheta:
    pass


Primitive = Union[MulT, MulTheta, Delta, Sigma, DT, DTheta]
Word = Tuple[Primitive, ...]
# (exponent, odd) or None for the zero result
BasisState = Optional[Tuple[int, bool]]


def primitive_parity(prim: Primitive) -> int:
    return 1 if isinstance(prim, (MulTheta, DTheta)) else 0


def word_parity(word: Word) -> int:
    return sum(primitive_parity(p) for p in word) % 2


def _apply_primitive(d: Deformation, prim: Primitive, n: int, odd: bool) -> Tuple[Optional[Scalar], BasisState]:
    if isinstance(prim, MulT):
        return None, (n + prim.k, odd)
    if isinstance(prim, MulTheta):
        return (None, (n, True)) if not odd else (None, None)
    if isinstance(prim, Delta):
        value = bracket_number(d, n)
        return (value + d.phi ** n if odd else value), (n, odd)
    if isinstance(prim, Sigma):
        return d.phi ** (n + 1 if odd else n), (n, odd)
    if isinstance(prim, DT):
        return bracket_number(d, n), (n, odd)
    if isinstance(prim, DTheta):
        return (d.phi ** n, (n, False)) if odd else (None, None)
    raise ValueError(f"unknown primitive {prim!r}")


def apply_word(d: Deformation, word: Word, n: int, odd: bool) -> Tuple[Scalar, BasisState]:
    """Coefficient and target basis state of ``word`` applied to t^n (or theta*t^n)."""
    coeff = PQ.one()
    state: BasisState = (n, odd)
    for prim in reversed(word):
        if state is None:
            break
        factor, state = _apply_primitive(d, prim, state[0], state[1])
        if factor is not None:
            coeff = coeff * factor
            if coeff.is_zero:
                return coeff, None
    return coeff, state


@dataclass(frozen=True)
class GradedOperator:
    deformation: Deformation
    terms: Tuple[Tuple[Scalar, Word], ...]
    parity: int

    def __post_init__(self) -> None:
        for _, word in self.terms:
            if word_parity(word) != self.parity:
                raise MixedParity(f"word {word!r} has parity {word_parity(word)}, operator parity is {self.parity}")

    @property
    def is_structurally_zero(self) -> bool:
        return not self.terms


def merge_terms(d: Deformation, parity: int, pairs: Iterable[Tuple[Scalar, Word]]) -> GradedOperator:
    merged: Dict[Word, Scalar] = {}
    for coeff, word in pairs:
        merged[word] = merged[word] + coeff if word in merged else coeff
    terms = tuple((c, w) for w, c in merged.items() if not c.is_zero)
    return GradedOperator(d, terms, parity)


def _scalar(value: Union[int, str, Scalar]) -> Scalar:
    return value if isinstance(value, Scalar) else PQ.constant(value)


def operator(d: Deformation, word: Word, coeff: Union[int, Scalar] = 1) -> GradedOperator:
    return merge_terms(d, word_parity(word), [(_scalar(coeff), word)])


def identity(d: Deformation) -> GradedOperator:
    return operator(d, ())


def zero_operator(d: Deformation, parity: int = 0) -> GradedOperator:
    return GradedOperator(d, (), parity)


def l_op(d: Deformation, m: int) -> GradedOperator:
    """l_m = -t^m Delta, parity 0."""
    return operator(d, (MulT(m), Delta()), -1)


def g_op(d: Deformation, m: int) -> GradedOperator:
    """G_m = -theta t^m Delta, parity 1."""
    return operator(d, (MulTheta(), MulT(m), Delta()), -1)


def _same_deformation(a: GradedOperator, b: GradedOperator) -> None:
    if a.deformation is not b.deformation and a.deformation != b.deformation:
        raise ContextMismatch(
            f"operators over '{a.deformation.name}' and '{b.deformation.name}' cannot be combined"
        )


def compose(a: GradedOperator, b: GradedOperator) -> GradedOperator:
    """a after b."""
    _same_deformation(a, b)
    pairs = [(ca * cb, wa + wb) for ca, wa in a.terms for cb, wb in b.terms]
    return merge_terms(a.deformation, (a.parity + b.parity) % 2, pairs)


def compose_all(ops: Sequence[GradedOperator]) -> GradedOperator:
    result = ops[0]
    for op in ops[1:]:
        result = compose(result, op)
    return result


def scale(coeff: Union[int, Scalar], a: GradedOperator) -> GradedOperator:
    return lin_comb([(coeff, a)])


def lin_comb(terms: Sequence[Tuple[Union[int, Scalar], GradedOperator]]) -> GradedOperator:
    if not terms:
        raise ValueError("lin_comb needs at least one term")
    first = terms[0][1]
    pairs: List[Tuple[Scalar, Word]] = []
    for coeff, op in terms:
        _same_deformation(first, op)
        if op.parity != first.parity:
            raise MixedParity(f"cannot add operators of parity {first.parity} and {op.parity}")
        c = _scalar(coeff)
        pairs.extend((c * oc, w) for oc, w in op.terms)
    return merge_terms(first.deformation, first.parity, pairs)


def apply_to_basis(op: GradedOperator, n: int, odd: bool = False) -> SuperElement:
    even: Dict[int, Scalar] = {}
    odd_part: Dict[int, Scalar] = {}
    for coeff, word in op.terms:
        factor, state = apply_word(op.deformation, word, n, odd)
        if state is None:
            continue
        target = odd_part if state[1] else even
        value = coeff * factor
        target[state[0]] = target[state[0]] + value if state[0] in target else value
    return SuperElement.of(even, odd_part)


def apply(op: GradedOperator, a: SuperElement) -> SuperElement:
    result = SuperElement.zero()
    for n, odd, c in a.monomials():
        result = result + apply_to_basis(op, n, odd).scale(c)
    return result


def window_indices(w: int) -> List[int]:
    """0, 1, -1, 2, -2, ..., w, -w."""
    order = [0]
    for k in range(1, w + 1):
        order.extend((k, -k))
    return order


def basis_window(w: int) -> List[Tuple[int, bool]]:
    return [(n, odd) for odd in (False, True) for n in window_indices(w)]


def first_difference(
    a: GradedOperator, b: GradedOperator, w: int = DEFAULT_WINDOW
) -> Optional[Tuple[int, bool, SuperElement, SuperElement]]:
    """First basis element in [-w, w] on which ``a`` and ``b`` disagree."""
    for n, odd in basis_window(w):
        left = apply_to_basis(a, n, odd)
        right = apply_to_basis(b, n, odd)
        if left != right:
            return n, odd, left, right
    return None


def op_equal_on_window(a: GradedOperator, b: GradedOperator, w: int = DEFAULT_WINDOW) -> bool:
    return first_difference(a, b, w) is None


def action_table(op: GradedOperator, w: int) -> List[Tuple[str, str]]:
    rows = []
    for n, odd in sorted(basis_window(w), key=lambda s: (s[1], s[0])):
        label = f"theta*t^{n}" if odd else f"t^{n}"
        rows.append((label, apply_to_basis(op, n, odd).render()))
    return rows


@dataclass(frozen=True)
class ExtendedOperator:
    """Operator part plus the coefficient of the central element C."""

    op: GradedOperator
    central: Scalar

    def equal_on_window(self, other: "ExtendedOperator", w: int = DEFAULT_WINDOW) -> bool:
        return self.central == other.central and op_equal_on_window(self.op, other.op, w)

    def negated(self) -> "ExtendedOperator":
        return ExtendedOperator(scale(-1, self.op), -self.central)
