"""
Toy model for the deformed super Virasoro constraints.

Level-a multiplication operators T^a_m = -[m]_a z^m and their fermionic
partners -theta [m]_a z^m, with [m]_a = (tau1^(am) - tau2^(am))/(tau1^a - tau2^a).
Right-hand sides of the product and commutator formulas are kept as
combinations of such operators so that they can be evaluated over the
formal (tau1, tau2) field or over any preset's tau pair.

The second half builds the constraint operators as differential operators
in the times t_0..t_N, truncated at total degree D, and compares their
composition with the product formulas through the dictionary
k! d/dt_k <-> x^k.
"""

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb, factorial
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from sympy.polys.domains import QQ
from sympy.polys.ring_series import rs_exp
from sympy.polys.rings import ring

from .brackets import MAX_ARITY, signed_permutations
from .deformation import Deformation, TauPair
from .errors import TruncationExceeded, UnsupportedArity
from .exactnum import PQ, TAU, Scalar, ScalarField, substitute_powers

FORMAL_TAU = TauPair(TAU.gen("tau1"), TAU.gen("tau2"))
ARIK_COON_TAU = TauPair(PQ.one(), PQ.gen("q"))
JAGANNATHAN_SRINIVASA_TAU = TauPair(PQ.gen("p"), PQ.gen("q"))
ARIK_COON_SUBSTITUTION = {"tau1": 1, "tau2": ("q", 1)}
JAGANNATHAN_SRINIVASA_SUBSTITUTION = {"tau1": ("p", 1), "tau2": ("q", 1)}


@dataclass(frozen=True)
class ToyOperator:
    level: int
    index: int
    fermionic: bool = False

    def __post_init__(self) -> None:
        if self.level < 1:
            raise ValueError(f"toy operator level must be >= 1, got {self.level}")

    def label(self) -> str:
        return f"{'TT' if self.fermionic else 'T'}^{self.level}_{self.index}"


ZKey = Tuple[int, int]


def _accumulate(target: Dict[Any, Scalar], key: Any, value: Scalar) -> None:
    target[key] = target[key] + value if key in target else value


@dataclass(frozen=True)
class ZElement:
    """Finite sum of c * z^k * theta^e with e in {0, 1}."""

    context: ScalarField
    terms: Mapping[ZKey, Scalar] = field(default_factory=dict)

    @classmethod
    def of(cls, context: ScalarField, terms: Mapping[ZKey, Scalar]) -> "ZElement":
        return cls(context, {k: v for k, v in sorted(terms.items()) if not v.is_zero})

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "ZElement") -> "ZElement":
        terms = dict(self.terms)
        for key, value in other.terms.items():
            _accumulate(terms, key, value)
        return ZElement.of(self.context, terms)

    def __sub__(self, other: "ZElement") -> "ZElement":
        return self + other.scale(-1)

    def scale(self, factor: Any) -> "ZElement":
        return ZElement.of(self.context, {k: v * factor for k, v in self.terms.items()})

    def __mul__(self, other: "ZElement") -> "ZElement":
        terms: Dict[ZKey, Scalar] = {}
        for (i, e1), c1 in self.terms.items():
            for (j, e2), c2 in other.terms.items():
                if e1 + e2 > 1:
                    continue
                _accumulate(terms, (i + j, e1 + e2), c1 * c2)
        return ZElement.of(self.context, terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ZElement):
            return NotImplemented
        return (self - other).is_zero

    __hash__ = None  # type: ignore[assignment]

    def substitute(self, assignment: Mapping[str, Any], target: ScalarField) -> "ZElement":
        return ZElement.of(target, {k: substitute_powers(v, assignment, target) for k, v in self.terms.items()})

    def render(self) -> str:
        if self.is_zero:
            return "0"
        parts = []
        for (k, e), c in self.terms.items():
            parts.append(f"({c.render()})*{'theta*' if e else ''}z^{k}")
        return " + ".join(parts)


ToyCombination = Tuple[Tuple[Scalar, ToyOperator], ...]


@dataclass(frozen=True)
class Comparison:
    """Left- and right-hand side of one identity instance."""

    label: str
    lhs: Any
    rhs: Any

    @property
    def holds(self) -> bool:
        return bool(self.lhs == self.rhs)

    def difference(self) -> Any:
        return self.lhs - self.rhs


def level_number(tau: TauPair, a: int, m: int) -> Scalar:
    """[m]_a = (tau1^(am) - tau2^(am)) / (tau1^a - tau2^a)."""
    return (tau.tau1 ** (a * m) - tau.tau2 ** (a * m)) / (tau.tau1 ** a - tau.tau2 ** a)


def toy_value(tau: TauPair, op: ToyOperator) -> ZElement:
    context = tau.tau1.context
    coeff = -level_number(tau, op.level, op.index)
    return ZElement.of(context, {(op.index, 1 if op.fermionic else 0): coeff})


def evaluate(tau: TauPair, combination: Iterable[Tuple[Scalar, ToyOperator]]) -> ZElement:
    total = ZElement(tau.tau1.context)
    for coeff, op in combination:
        total = total + toy_value(tau, op).scale(coeff)
    return total


def _gap(tau: TauPair, a: int) -> Scalar:
    return tau.tau1 ** a - tau.tau2 ** a


def product_rhs(tau: TauPair, a: int, b: int, m: int, n: int, fermionic: bool = False) -> ToyCombination:
    """Three-term expansion of T^a_m T^b_n (or T^a_m TT^b_n when ``fermionic``)."""
    t1, t2 = tau.tau1, tau.tau2
    shift = m + 1 if fermionic else m
    index = m + n + 1 if fermionic else m + n
    return (
        (-_gap(tau, a + b) * t1 ** (-shift * b) / (_gap(tau, a) * _gap(tau, b)), ToyOperator(a + b, index, fermionic)),
        (t2 ** (-n * b) / _gap(tau, b), ToyOperator(a, index, fermionic)),
        (t2 ** (index * a) * t1 ** (-shift * b) / _gap(tau, a), ToyOperator(b, index, fermionic)),
    )


def commutator_rhs(tau: TauPair, a: int, b: int, m: int, n: int) -> ToyCombination:
    t1, t2 = tau.tau1, tau.tau2
    s = m + n
    return (
        (
            _gap(tau, a + b) * (t1 ** (-n * a) - t1 ** (-m * b)) / (_gap(tau, a) * _gap(tau, b)),
            ToyOperator(a + b, s),
        ),
        (-(t2 ** (s * b)) * (t1 ** (-n * a) - t2 ** (-m * b)) / _gap(tau, b), ToyOperator(a, s)),
        (t2 ** (s * a) * (t1 ** (-m * b) - t2 ** (-n * a)) / _gap(tau, a), ToyOperator(b, s)),
    )


def super_commutator_rhs(tau: TauPair, a: int, b: int, m: int, n: int) -> ToyCombination:
    """General display of [T^a_m, TT^b_n], anomaly f(m, n) included in its literal form."""
    t1, t2 = tau.tau1, tau.tau2
    s = m + n
    main = (
        (
            _gap(tau, a + b) * (t1 ** (-n * a) - t1 ** (-m * b + a)) / (_gap(tau, a) * _gap(tau, b)),
            ToyOperator(a + b, s, True),
        ),
        (t2 ** (b * s) * (t2 ** (-b * m) * t1 ** a - t1 ** (-a * n)) / _gap(tau, b), ToyOperator(a, s, True)),
        (t2 ** (a * s) * (t1 ** (-m * b) * t2 ** a - t2 ** (-a * n)) / _gap(tau, a), ToyOperator(b, s, True)),
    )
    anomaly = (
        (-(t1 ** (a + b) - t2 ** (a + b) * t1 ** (-(m + 1) * b) * t2 ** b), ToyOperator(a + b, 1, True)),
        (t2 ** (s * a) * t2 ** (n * b) / _gap(tau, b), ToyOperator(a, 1, True)),
        (t2 ** (s * (a + b)) * t1 ** (-(m + 1) * b) * t2 ** a / _gap(tau, a), ToyOperator(b, 1, True)),
    )
    return main + anomaly


def super_commutator_rhs_equal_levels(tau: TauPair, a: int, m: int, n: int) -> ToyCombination:
    """The a = b display of [T^a_m, TT^a_n]; [2(m+1)]_a/[m+1]_a = tau1^(a(m+1)) + tau2^(a(m+1))."""
    t1, t2 = tau.tau1, tau.tau2
    s = m + n
    gap = _gap(tau, a)
    two = level_number(tau, a, 2)
    inner = (t2 ** (-a * m) * t1 ** a - t1 ** (-a * n)) + (t1 ** (-a * m) * t2 ** a - t2 ** (-a * n))
    anomaly_scale = -(t1 ** (-(m + 1) * a)) * t2 ** (a * s) / gap
    ratio = t1 ** (a * (m + 1)) + t2 ** (a * (m + 1))
    return (
        ((t1 ** (-a * n) - t1 ** (-(m - 1) * a)) / gap * two, ToyOperator(2 * a, s, True)),
        (t2 ** (s * a) / gap * inner, ToyOperator(a, s, True)),
        (anomaly_scale * t2 ** (a * m) * two, ToyOperator(2 * a, 1, True)),
        (-anomaly_scale * ratio, ToyOperator(a, 1, True)),
    )


def toy_product(tau: TauPair, first: ToyOperator, second: ToyOperator) -> Comparison:
    lhs = toy_value(tau, first) * toy_value(tau, second)
    label = f"{first.label()}*{second.label()}"
    if first.fermionic and second.fermionic:
        return Comparison(label, lhs, ZElement(tau.tau1.context))
    if first.fermionic:
        # multiplication operators commute, so TT^a_m T^b_n uses the expansion of T^b_n TT^a_m
        first, second = second, first
    rhs = evaluate(tau, product_rhs(tau, first.level, second.level, first.index, second.index, second.fermionic))
    return Comparison(label, lhs, rhs)


def toy_commutator(tau: TauPair, first: ToyOperator, second: ToyOperator, equal_levels: bool = False) -> Comparison:
    """Graded commutator of two toy operators against the displayed expansion.

    ``equal_levels`` selects the a = b display of the mixed bracket.
    """
    x, y = toy_value(tau, first), toy_value(tau, second)
    both_odd = first.fermionic and second.fermionic
    lhs = x * y + y * x if both_odd else x * y - y * x
    label = f"[{first.label()}, {second.label()}]"
    context = tau.tau1.context
    if both_odd:
        return Comparison(label, lhs, ZElement(context))
    if not first.fermionic and not second.fermionic:
        rhs = evaluate(tau, commutator_rhs(tau, first.level, second.level, first.index, second.index))
        return Comparison(label, lhs, rhs)
    sign = 1
    if first.fermionic:
        first, second, sign = second, first, -1
    if equal_levels:
        if first.level != second.level:
            raise ValueError(f"the equal-level display needs a = b, got {first.level} and {second.level}")
        combination = super_commutator_rhs_equal_levels(tau, first.level, first.index, second.index)
    else:
        combination = super_commutator_rhs(tau, first.level, second.level, first.index, second.index)
    return Comparison(label, lhs, evaluate(tau, combination).scale(sign))


@dataclass(frozen=True)
class ToyNBracket:
    levi_civita_sum: ZElement
    ordered_product: ZElement
    closed_form: ZElement


def _product(tau: TauPair, ops: Sequence[ToyOperator]) -> ZElement:
    result = ZElement.of(tau.tau1.context, {(0, 0): tau.tau1.context.one()})
    for op in ops:
        result = result * toy_value(tau, op)
    return result


def _pair_product(ms: Sequence[int], factor: Any) -> Scalar:
    value = None
    for j, k in itertools.combinations(range(len(ms)), 2):
        term = factor(ms[j], ms[k])
        value = term if value is None else value * term
    return value


def _bosonic_closed_form(tau: TauPair, ms: Sequence[int], a: int) -> ZElement:
    t1, t2 = tau.tau1, tau.tau2
    n, s = len(ms), sum(ms)
    gap = _gap(tau, a)
    lead = gap ** comb(n, 2) * _pair_product(ms, lambda mj, mk: level_number(tau, a, mk) - level_number(tau, a, mj))
    big_m = t1 ** (-a * (n - 1) * s) * (lead + _pair_product(ms, lambda mj, mk: t2 ** (a * mk) - t2 ** (a * mj)))
    big_c = t2 ** (-a * (n - 1) * s) * (
        lead + (-1) ** (n - 1) * _pair_product(ms, lambda mj, mk: t1 ** (a * mk) - t1 ** (a * mj))
    )
    outer = (-1) ** (n + 1) / gap ** (n - 1)
    combination = (
        (outer * big_m * level_number(tau, a, n), ToyOperator(n * a, s)),
        (-outer * level_number(tau, a, n - 1) * t2 ** (a * s) * (big_m + big_c), ToyOperator((n - 1) * a, s)),
    )
    return evaluate(tau, combination)


def _super_closed_form(tau: TauPair, ms: Sequence[int], a: int) -> ZElement:
    """A/F/S closed form; the bare index m of the anomaly term is m_1."""
    t1, t2 = tau.tau1, tau.tau2
    n, s = len(ms), sum(ms)
    gap = _gap(tau, a)
    pairs = comb(n, 2)

    def level(k: int) -> Scalar:
        return level_number(tau, a, k)

    big_a = t1 ** (-a * (n - 1) * (s - n)) * (
        gap ** pairs * _pair_product(ms, lambda mj, mk: level(mk - 1) - level(mj))
        + _pair_product(ms, lambda mj, mk: t2 ** (a * (mk - 1)) - t2 ** (a * mj))
    )
    big_f = t1 ** (-a * (n - 1) * s) * (
        gap ** pairs * _pair_product(ms, lambda mj, mk: level(mk) - level(mj) * t2 ** pairs)
        + _pair_product(ms, lambda mj, mk: t2 ** (a * mk) - t2 ** (a * mj) * t2 ** pairs)
    )
    big_s = t2 ** (-a * (n - 1) * s) * (
        gap ** pairs * _pair_product(ms, lambda mj, mk: level(mk) - level(mj) * t1 ** pairs)
        + (-1) ** (n - 1) * _pair_product(ms, lambda mj, mk: t1 ** (a * mk) - t1 ** (a * mj) * t1 ** pairs)
    )
    outer = (-1) ** (n + 1) / gap ** (n - 1)
    m = ms[0]
    anomaly = outer * t1 ** (-(m + 1) * a) * t2 ** (a * s)
    ratio = t1 ** (a * (m + 1)) + t2 ** (a * (m + 1))
    combination = (
        (outer * big_a * level(n), ToyOperator(n * a, s, True)),
        (-outer * level(n - 1) * t2 ** (a * s) * (big_f + big_s), ToyOperator((n - 1) * a, s)),
        (anomaly * t2 ** (a * m) * level(n), ToyOperator(n * a, 1, True)),
        (-anomaly * ratio, ToyOperator((n - 1) * a, 1, True)),
    )
    return evaluate(tau, combination)


def toy_n_bracket(tau: TauPair, ms: Sequence[int], a: int, fermionic: bool = False) -> ToyNBracket:
    """Same-level n-bracket; with ``fermionic`` the last index belongs to TT."""
    n = len(ms)
    if not 2 <= n <= MAX_ARITY:
        raise UnsupportedArity(f"toy n-brackets are supported for 2 <= n <= {MAX_ARITY}, got n={n}")
    context = tau.tau1.context
    total = ZElement(context)
    if fermionic:
        bosonic = [ToyOperator(a, m) for m in ms[:-1]]
        odd = ToyOperator(a, ms[-1], True)
        for j in range(n):
            for perm, sign in signed_permutations(n - 1):
                ordered = [bosonic[i] for i in perm]
                word = ordered[:j] + [odd] + ordered[j:]
                total = total + _product(tau, word).scale((-1) ** (n - 1 + j) * sign)
        ordered_product = _product(tau, bosonic + [odd])
        closed = _super_closed_form(tau, ms, a)
    else:
        ops = [ToyOperator(a, m) for m in ms]
        for perm, sign in signed_permutations(n):
            total = total + _product(tau, [ops[i] for i in perm]).scale(sign)
        ordered_product = _product(tau, ops)
        closed = _bosonic_closed_form(tau, ms, a)
    return ToyNBracket(total, ordered_product, closed)


def printed_instance(family: str, kind: str, a: int, b: int, m: int, n: int) -> ToyCombination:
    """Literal specialized formulas for the Arik-Coon ("ac") and (p,q) ("js") families.

    ``kind`` is one of prod1, prod2, scrto, scrgo.
    """
    q = PQ.gen("q")
    p = PQ.one() if family == "ac" else PQ.gen("p")
    if family not in ("ac", "js"):
        raise ValueError(f"unknown printed family '{family}'; expected 'ac' or 'js'")
    s = m + n
    if family == "ac":
        gap_a, gap_b, gap_ab = q ** a - 1, q ** b - 1, q ** (a + b) - 1
        table: Dict[str, ToyCombination] = {
            "prod1": (
                (-gap_ab / (gap_a * gap_b), ToyOperator(a + b, s)),
                (1 / gap_b, ToyOperator(a, s)),
                (q ** (-m * b) / gap_a, ToyOperator(b, s)),
            ),
            "prod2": (
                (-gap_ab * q ** (-(m + 1) * b) / (gap_a * gap_b), ToyOperator(a + b, s + 1, True)),
                (1 / gap_b, ToyOperator(a, s + 1, True)),
                (q ** (-(m + 1) * b) / gap_a, ToyOperator(b, s + 1, True)),
            ),
            "scrto": (
                (gap_ab * (q ** (-n * a) - q ** (-m * b)) / (gap_a * gap_b), ToyOperator(a + b, s)),
                (-(q ** (-n * a) - 1) / gap_b, ToyOperator(a, s)),
                ((q ** (-m * b) - 1) / gap_a, ToyOperator(b, s)),
            ),
            "scrgo": (
                (gap_ab * (q ** (-n * a) - q ** (-m * b + a)) / (gap_a * gap_b), ToyOperator(a + b, s, True)),
                ((q ** (-m * b) * q ** a - 1) / gap_b, ToyOperator(a, s, True)),
                ((q ** (-m * b) - 1) / gap_a, ToyOperator(b, s, True)),
                (-gap_ab * q ** (-m * b - b) / (gap_a * gap_b), ToyOperator(a + b, 1, True)),
                (1 / gap_b, ToyOperator(a, 1, True)),
                (q ** (-m * b - b) / gap_a, ToyOperator(b, 1, True)),
            ),
        }
    else:
        gap_a, gap_b, gap_ab = p ** a - q ** a, p ** b - q ** b, p ** (a + b) - q ** (a + b)
        table = {
            "prod1": (
                (-gap_ab * p ** (-m * b) / (gap_a * gap_b), ToyOperator(a + b, s)),
                (q ** (-n * b) / gap_b, ToyOperator(a, s)),
                (q ** (s * a) * p ** (-m * b) / gap_a, ToyOperator(b, s)),
            ),
            "prod2": (
                (-gap_ab * p ** (-(m + 1) * b) / (gap_a * gap_b), ToyOperator(a + b, s + 1, True)),
                (q ** (-n * b) / gap_b, ToyOperator(a, s + 1, True)),
                (q ** ((s + 1) * a) * p ** (-(m + 1) * b) / gap_a, ToyOperator(b, s + 1, True)),
            ),
            "scrto": (
                (gap_ab * (p ** (-n * a) - p ** (-m * b)) / (gap_a * gap_b), ToyOperator(a + b, s)),
                (-(q ** (s * b)) * (p ** (-n * a) - q ** (-m * b)) / gap_b, ToyOperator(a, s)),
                (q ** (s * a) * (p ** (-m * b) - q ** (-n * a)) / gap_a, ToyOperator(b, s)),
            ),
            "scrgo": (
                (gap_ab * (p ** (-n * a) - p ** (-m * b + a)) / (gap_a * gap_b), ToyOperator(a + b, s, True)),
                (q ** (s * b) * (q ** (-m * b) * p ** a - p ** (-n * a)) / gap_b, ToyOperator(a, s, True)),
                (q ** (s * a) * (p ** (-m * b) * q ** a - q ** (-n * a)) / gap_a, ToyOperator(b, s, True)),
                (
                    -gap_ab * p ** (-m * b - b) * q ** ((a + b) * s) / (gap_a * gap_b),
                    ToyOperator(a + b, 1, True),
                ),
                (q ** (s * a) * q ** (n * b) / gap_b, ToyOperator(a, 1, True)),
                (q ** (s * (a + b)) * p ** (-m * b - b) * q ** a / gap_a, ToyOperator(b, 1, True)),
            ),
        }
    if kind not in table:
        raise ValueError(f"unknown printed formula '{kind}'; expected one of {', '.join(table)}")
    return table[kind]


def general_instance(tau: TauPair, kind: str, a: int, b: int, m: int, n: int) -> ToyCombination:
    if kind == "prod1":
        return product_rhs(tau, a, b, m, n)
    if kind == "prod2":
        return product_rhs(tau, a, b, m, n, fermionic=True)
    if kind == "scrto":
        return commutator_rhs(tau, a, b, m, n)
    if kind == "scrgo":
        return super_commutator_rhs(tau, a, b, m, n)
    raise ValueError(f"unknown formula '{kind}'")


def substitution_consistency(
    kind: str, a: int, b: int, m: int, n: int, assignment: Mapping[str, Any], specialized: TauPair
) -> Comparison:
    """General expansion over the formal taus, then substituted, against direct evaluation at ``specialized``."""
    substituted = evaluate(FORMAL_TAU, general_instance(FORMAL_TAU, kind, a, b, m, n)).substitute(assignment, PQ)
    direct = evaluate(specialized, general_instance(specialized, kind, a, b, m, n))
    return Comparison(f"{kind} substituted vs direct", substituted, direct)


def printed_consistency(family: str, kind: str, a: int, b: int, m: int, n: int) -> Comparison:
    tau = ARIK_COON_TAU if family == "ac" else JAGANNATHAN_SRINIVASA_TAU
    general = evaluate(tau, general_instance(tau, kind, a, b, m, n))
    printed = evaluate(tau, printed_instance(family, kind, a, b, m, n))
    return Comparison(f"{kind} general vs printed {family}", general, printed)


@dataclass(frozen=True)
class Truncation:
    """Times t_0..t_max_index, monomials of total degree <= max_degree."""

    max_index: int = 8
    max_degree: int = 4

    def __post_init__(self) -> None:
        if self.max_index < 1 or self.max_degree < 1:
            raise ValueError(f"truncation needs N >= 1 and D >= 1, got N={self.max_index} D={self.max_degree}")

    @property
    def width(self) -> int:
        return self.max_index + 1

    def admits(self, exponents: Sequence[int]) -> bool:
        return sum(exponents) <= self.max_degree


Monomial = Tuple[int, ...]


@dataclass(frozen=True)
class TimesPolynomial:
    context: ScalarField
    truncation: Truncation
    terms: Mapping[Monomial, Scalar] = field(default_factory=dict)

    @classmethod
    def of(cls, context: ScalarField, truncation: Truncation, terms: Mapping[Monomial, Scalar]) -> "TimesPolynomial":
        kept = {e: c for e, c in sorted(terms.items()) if not c.is_zero and truncation.admits(e)}
        return cls(context, truncation, kept)

    @classmethod
    def constant(cls, context: ScalarField, truncation: Truncation, value: Any = 1) -> "TimesPolynomial":
        scalar = value if isinstance(value, Scalar) else context.constant(value)
        return cls.of(context, truncation, {(0,) * truncation.width: scalar})

    @classmethod
    def time(cls, context: ScalarField, truncation: Truncation, k: int) -> "TimesPolynomial":
        if not 0 <= k <= truncation.max_index:
            raise TruncationExceeded(f"time t_{k} is outside t_0..t_{truncation.max_index}")
        exponents = [0] * truncation.width
        exponents[k] = 1
        return cls.of(context, truncation, {tuple(exponents): context.one()})

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "TimesPolynomial") -> "TimesPolynomial":
        terms = dict(self.terms)
        for e, c in other.terms.items():
            _accumulate(terms, e, c)
        return TimesPolynomial.of(self.context, self.truncation, terms)

    def __sub__(self, other: "TimesPolynomial") -> "TimesPolynomial":
        return self + other.scale(-1)

    def scale(self, factor: Any) -> "TimesPolynomial":
        return TimesPolynomial.of(self.context, self.truncation, {e: c * factor for e, c in self.terms.items()})

    def __mul__(self, other: "TimesPolynomial") -> "TimesPolynomial":
        terms: Dict[Monomial, Scalar] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                exponents = tuple(x + y for x, y in zip(e1, e2))
                if self.truncation.admits(exponents):
                    _accumulate(terms, exponents, c1 * c2)
        return TimesPolynomial.of(self.context, self.truncation, terms)

    def derivative(self, k: int) -> "TimesPolynomial":
        terms: Dict[Monomial, Scalar] = {}
        for e, c in self.terms.items():
            if e[k]:
                lowered = e[:k] + (e[k] - 1,) + e[k + 1 :]
                terms[lowered] = c * e[k]
        return TimesPolynomial.of(self.context, self.truncation, terms)

    def rescale_times(self, weights: Mapping[int, Scalar]) -> "TimesPolynomial":
        """Substitute t_k -> weights[k] * t_k."""
        terms = {}
        for e, c in self.terms.items():
            value = c
            for k, power in enumerate(e):
                if power:
                    value = value * weights[k] ** power
            terms[e] = value
        return TimesPolynomial.of(self.context, self.truncation, terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TimesPolynomial):
            return NotImplemented
        return (self - other).is_zero

    __hash__ = None  # type: ignore[assignment]

    def render(self) -> str:
        return _render_monomials(self.terms.items(), lambda e: _times_text(e))


def _times_text(exponents: Sequence[int]) -> str:
    factors = [f"t_{k}^{p}" if p > 1 else f"t_{k}" for k, p in enumerate(exponents) if p]
    return "*".join(factors)


def _render_monomials(items: Iterable[Tuple[Any, Scalar]], text: Any) -> str:
    parts = []
    for key, c in items:
        body = text(key)
        parts.append(f"({c.render()})*{body}" if body else f"({c.render()})")
    return " + ".join(parts) if parts else "0"


def bell_polynomial(k: int, truncation: Optional[Truncation] = None, context: ScalarField = PQ) -> TimesPolynomial:
    """Complete Bell polynomial B_k(t_1..t_k) via B_(j+1) = sum_i C(j,i) B_(j-i) t_(i+1)."""
    truncation = truncation or Truncation(max(k, 1), max(k, 1))
    if k > truncation.max_index:
        raise TruncationExceeded(f"B_{k} needs t_{k} but times stop at t_{truncation.max_index}")
    bells = [TimesPolynomial.constant(context, truncation)]
    for j in range(k):
        nxt = TimesPolynomial(context, truncation)
        for i in range(j + 1):
            nxt = nxt + (bells[j - i] * TimesPolynomial.time(context, truncation, i + 1)).scale(comb(j, i))
        bells.append(nxt)
    return bells[k]


def bell_polynomial_series(k: int, truncation: Optional[Truncation] = None, context: ScalarField = PQ) -> TimesPolynomial:
    """B_k read off k! [x^k] exp(sum_s t_s x^s / s!)."""
    truncation = truncation or Truncation(max(k, 1), max(k, 1))
    if k > truncation.max_index:
        raise TruncationExceeded(f"B_{k} needs t_{k} but times stop at t_{truncation.max_index}")
    if k == 0:
        return TimesPolynomial.constant(context, truncation)
    names = ["x"] + [f"t{s}" for s in range(1, k + 1)]
    _, *gens = ring(",".join(names), QQ)
    x, times = gens[0], gens[1:]
    exponent = sum((times[s - 1] * x ** s * QQ(1, factorial(s)) for s in range(1, k + 1)), x * 0)
    series = rs_exp(exponent, x, k + 1)
    terms: Dict[Monomial, Scalar] = {}
    for monom, coeff in series.terms():
        if monom[0] != k:
            continue
        exponents = (0,) + tuple(monom[1:]) + (0,) * (truncation.max_index - k)
        terms[exponents] = context.constant(coeff * factorial(k))
    return TimesPolynomial.of(context, truncation, terms)


Derivatives = Tuple[int, ...]


@dataclass(frozen=True)
class DiffOperator:
    """sum of coefficient(t) * d/dt_i1 ... d/dt_ik, optionally times theta."""

    truncation: Truncation
    terms: Tuple[Tuple[TimesPolynomial, Derivatives], ...]
    odd: bool = False

    def __post_init__(self) -> None:
        for _, derivatives in self.terms:
            if any(k > self.truncation.max_index for k in derivatives):
                raise TruncationExceeded(f"derivative index beyond t_{self.truncation.max_index}: {derivatives}")

    def render(self) -> str:
        parts = []
        for coeff, derivatives in self.terms:
            ds = "".join(f"d{k}" for k in derivatives)
            parts.append(f"[{coeff.render()}]{ds}")
        body = " + ".join(parts) if parts else "0"
        return f"theta*({body})" if self.odd else body


def _normalize(
    context: ScalarField, truncation: Truncation, pairs: Iterable[Tuple[TimesPolynomial, Derivatives]]
) -> Tuple[Tuple[TimesPolynomial, Derivatives], ...]:
    merged: Dict[Derivatives, TimesPolynomial] = {}
    for coeff, derivatives in pairs:
        key = tuple(sorted(derivatives))
        merged[key] = merged[key] + coeff if key in merged else coeff
    return tuple((c, d) for d, c in sorted(merged.items()) if not c.is_zero)


def constraint_diff_op(
    d: Deformation, m: int, a: int, gamma: int, truncation: Truncation, fermionic: bool = False
) -> DiffOperator:
    """[m+gamma]_a m! d/dt_m + phi^(m+gamma)/(tau1^a - tau2^a) sum_k (k+m)!/k! B_k(t^a) d/dt_(k+m).

    The sum stops at k = N - m; t^a_k = (tau1^(ak) - tau2^(ak)) t_k.
    """
    if m < 0:
        raise ValueError(f"constraint operators need m >= 0, got {m}")
    if m > truncation.max_index:
        raise TruncationExceeded(f"constraint operator index {m} exceeds N={truncation.max_index}")
    tau = d.require_tau()
    context = d.phi.context
    pairs: List[Tuple[TimesPolynomial, Derivatives]] = []
    lead = level_number(tau, a, m + gamma) * factorial(m)
    pairs.append((TimesPolynomial.constant(context, truncation, lead), (m,)))
    weights = {k: tau.tau1 ** (a * k) - tau.tau2 ** (a * k) for k in range(truncation.width)}
    scale_factor = d.phi ** (m + gamma) / _gap(tau, a)
    for k in range(1, truncation.max_index - m + 1):
        bell = _bell_cached(k, truncation, context).rescale_times(weights)
        pairs.append((bell.scale(scale_factor * (factorial(k + m) // factorial(k))), (k + m,)))
    return DiffOperator(truncation, _normalize(context, truncation, pairs), fermionic)


@lru_cache(maxsize=256)
def _bell_cached(k: int, truncation: Truncation, context: ScalarField) -> TimesPolynomial:
    return bell_polynomial(k, truncation, context)


def apply_diff(op: DiffOperator, f: TimesPolynomial) -> TimesPolynomial:
    total = TimesPolynomial(f.context, op.truncation)
    for coeff, derivatives in op.terms:
        value = f
        for k in derivatives:
            value = value.derivative(k)
        total = total + coeff * value
    return total


def compose_diff(first: DiffOperator, second: DiffOperator) -> DiffOperator:
    """first after second, normal ordered with the product rule applied exactly."""
    if first.odd and second.odd:
        return DiffOperator(first.truncation, (), False)
    context = _context_of(first, second)
    pairs: List[Tuple[TimesPolynomial, Derivatives]] = []
    for a_coeff, a_ders in first.terms:
        current = [(b_coeff, b_ders) for b_coeff, b_ders in second.terms]
        for k in a_ders:
            expanded = []
            for coeff, ders in current:
                expanded.append((coeff.derivative(k), ders))
                expanded.append((coeff, ders + (k,)))
            current = expanded
        pairs.extend((a_coeff * coeff, ders) for coeff, ders in current)
    return DiffOperator(first.truncation, _normalize(context, first.truncation, pairs), first.odd or second.odd)


def _context_of(*ops: DiffOperator) -> ScalarField:
    for op in ops:
        for coeff, _ in op.terms:
            return coeff.context
    return PQ


DictKey = Tuple[int, int, Monomial]


@dataclass(frozen=True)
class DictionaryImage:
    """Image of a differential operator under d/dt_k -> x^k / k!, keyed by (theta, x power, times)."""

    terms: Mapping[DictKey, Scalar] = field(default_factory=dict)

    @classmethod
    def of(cls, terms: Mapping[DictKey, Scalar]) -> "DictionaryImage":
        return cls({k: v for k, v in sorted(terms.items()) if not v.is_zero})

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "DictionaryImage") -> "DictionaryImage":
        terms = dict(self.terms)
        for key, value in other.terms.items():
            _accumulate(terms, key, value)
        return DictionaryImage.of(terms)

    def __sub__(self, other: "DictionaryImage") -> "DictionaryImage":
        return self + other.scale(-1)

    def scale(self, factor: Any) -> "DictionaryImage":
        return DictionaryImage.of({k: v * factor for k, v in self.terms.items()})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DictionaryImage):
            return NotImplemented
        return (self - other).is_zero

    __hash__ = None  # type: ignore[assignment]

    def render(self) -> str:
        def text(key: DictKey) -> str:
            theta, power, times = key
            parts = (["theta"] if theta else []) + ([f"x^{power}"] if power else []) + [_times_text(times)]
            return "*".join(p for p in parts if p)

        return _render_monomials(self.terms.items(), text)


def dictionary_image(op: DiffOperator) -> DictionaryImage:
    terms: Dict[DictKey, Scalar] = {}
    for coeff, derivatives in op.terms:
        weight = 1
        for k in derivatives:
            weight *= factorial(k)
        for times, value in coeff.terms.items():
            _accumulate(terms, (int(op.odd), sum(derivatives), times), value / weight)
    return DictionaryImage.of(terms)


def dictionary_check(
    d: Deformation, m: int, n: int, a: int, b: int, gamma: int, truncation: Truncation, fermionic: bool = False
) -> Comparison:
    """Composed constraint operators against the product expansion, both under the dictionary.

    Coefficients use m+gamma and n+gamma; the right-hand operators have index
    m+n (m+n+1 for the fermionic product) at levels a+b, a and b.
    """
    tau = d.require_tau()
    left = compose_diff(
        constraint_diff_op(d, m, a, gamma, truncation),
        constraint_diff_op(d, n, b, gamma, truncation, fermionic),
    )
    rhs = DictionaryImage()
    for coeff, op in product_rhs(tau, a, b, m + gamma, n + gamma, fermionic):
        index = m + n + 1 if fermionic else m + n
        target = constraint_diff_op(d, index, op.level, gamma, truncation, fermionic)
        rhs = rhs + dictionary_image(target).scale(coeff)
    label = f"T^{a}_{m}*{'TT' if fermionic else 'T'}^{b}_{n} gamma={gamma}"
    return Comparison(label, dictionary_image(left), rhs)


def tau_identity_holds(tau: TauPair, a: int, m: int) -> bool:
    """[m]_a (tau1^a - tau2^a) = tau1^(am) - tau2^(am)."""
    return level_number(tau, a, m) * _gap(tau, a) == tau.tau1 ** (a * m) - tau.tau2 ** (a * m)
