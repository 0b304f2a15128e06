"""
Bracket structures on the generators l_m and G_m.

Weighted binary brackets (chi/tau weights), Levi-Civita n-brackets with
their closed forms, the Virasoro 2n-bracket with its central term, the
super Virasoro brackets and the super Jacobi cyclic-sum verifier.

Prefactor rules:
  even-n bosonic  [-2S]/(2[-S]), taken as (tau1^-S + tau2^-S)/2 when a tau
                  pair exists (equal to 1 at S = 0), literal otherwise
  super, rnb2     [-2S-1]/(2[-S-1]), literal
  super, rcom2    [-2S-1]/(2[S-1]), literal
A vanishing literal denominator raises SingularPrefactor.
"""

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import comb, factorial
from typing import List, Sequence, Tuple

from sympy.combinatorics.permutations import Permutation

from .deformation import Deformation, bracket_number
from .errors import DegenerateWeights, SingularPrefactor, UnsupportedArity
from .exactnum import PQ, Scalar
from .operators import (
    Delta,
    ExtendedOperator,
    GradedOperator,
    MulT,
    MulTheta,
    Word,
    compose,
    g_op,
    l_op,
    lin_comb,
    merge_terms,
    scale,
    zero_operator,
)
from .report import Cell, IdentityReport

MAX_ARITY = 6
PREFACTOR_VARIANTS = ("rnb2", "rcom2")
JACOBI_CONVENTIONS = (
    "outer bracket weighted with chi/tau weights of (outer index, inner index sum)",
    "[G_a, l_b] = -[l_b, G_a] with tau weights (b, a)",
    "[G_a, G_b] plain anticommutator",
    "rho(l_m) = (tau1^m + tau2^m) l_m, rho(G_m) = (tau1^(m+1) + tau2^(m+1)) G_m",
)


@dataclass(frozen=True)
class BracketWeights:
    """Coefficients of A∘B and B∘A in a weighted bracket."""

    x: Scalar
    y: Scalar
    kind: str = "chi"

    @property
    def xhat(self) -> Scalar:
        return self.x

    @property
    def yhat(self) -> Scalar:
        return self.y


@dataclass(frozen=True)
class Generator:
    kind: str
    index: int

    def __post_init__(self) -> None:
        if self.kind not in ("l", "G"):
            raise ValueError(f"generator kind must be 'l' or 'G', got '{self.kind}'")

    @property
    def parity(self) -> int:
        return 1 if self.kind == "G" else 0

    def operator(self, d: Deformation) -> GradedOperator:
        return g_op(d, self.index) if self.kind == "G" else l_op(d, self.index)

    def label(self) -> str:
        return f"{self.kind}_{self.index}"


def chi_weight(d: Deformation, m1: int, m2: int) -> BracketWeights:
    if m1 == m2:
        return BracketWeights(PQ.one(), PQ.one(), "chi")
    shift = d.phi ** (m2 - m1)
    denominator = shift * bracket_number(d, m1) - bracket_number(d, m2)
    if denominator.is_zero:
        raise DegenerateWeights(f"chi weight denominator vanishes for m1={m1}, m2={m2} over '{d.name}'")
    chi = (bracket_number(d, m1) - bracket_number(d, m2)) / denominator
    return BracketWeights(chi, shift * chi, "chi")


def tau_weight(d: Deformation, m1: int, m2: int) -> BracketWeights:
    shift = d.phi ** (1 + m2 - m1)
    denominator = shift * bracket_number(d, m1) - bracket_number(d, m2) - d.phi ** m2
    if denominator.is_zero:
        raise DegenerateWeights(f"tau weight denominator vanishes for m1={m1}, m2={m2} over '{d.name}'")
    tau = (bracket_number(d, m1) - bracket_number(d, m2 + 1)) / denominator
    return BracketWeights(tau, shift * tau, "tau")


def weighted_commutator(a: GradedOperator, b: GradedOperator, w: BracketWeights) -> GradedOperator:
    return lin_comb([(w.xhat, compose(a, b)), (-w.yhat, compose(b, a))])


def anticommutator(a: GradedOperator, b: GradedOperator) -> GradedOperator:
    return lin_comb([(1, compose(a, b)), (1, compose(b, a))])


def generator_bracket(
    d: Deformation, a: Generator, b: Generator, a_op: GradedOperator, b_op: GradedOperator
) -> GradedOperator:
    """Bracket of two operators carrying generator types and indices."""
    if a.kind == "l" and b.kind == "l":
        return weighted_commutator(a_op, b_op, chi_weight(d, a.index, b.index))
    if a.kind == "l":
        return weighted_commutator(a_op, b_op, tau_weight(d, a.index, b.index))
    if b.kind == "l":
        return scale(-1, weighted_commutator(b_op, a_op, tau_weight(d, b.index, a.index)))
    return anticommutator(a_op, b_op)


def levi_civita(upper: Sequence[int], lower: Sequence[int]) -> int:
    if len(upper) != len(lower):
        raise ValueError(f"levi_civita needs equal lengths, got {len(upper)} and {len(lower)}")
    if len(set(upper)) != len(upper) or set(upper) != set(lower):
        return 0
    position = {v: i for i, v in enumerate(lower)}
    return int(Permutation([position[v] for v in upper]).signature())


@lru_cache(maxsize=None)
def signed_permutations(n: int) -> Tuple[Tuple[Tuple[int, ...], int], ...]:
    """All permutations of range(n) with their signs, identity first."""
    if n > MAX_ARITY:
        raise UnsupportedArity(f"permutation sums are supported up to n={MAX_ARITY}, got n={n}")
    return tuple((perm, int(Permutation(list(perm)).signature())) for perm in itertools.permutations(range(n)))


def _check_arity(n: int, low: int = 3) -> None:
    if not low <= n <= MAX_ARITY:
        raise UnsupportedArity(f"n-brackets are supported for {low} <= n <= {MAX_ARITY}, got n={n}")


def bosonic_prefactor(d: Deformation, total: int) -> Scalar:
    if d.tau is not None:
        return (d.tau.tau1 ** (-total) + d.tau.tau2 ** (-total)) / 2
    denominator = 2 * bracket_number(d, -total)
    if denominator.is_zero:
        raise SingularPrefactor(f"[{-total}] = 0 in the even-n prefactor over '{d.name}'")
    return bracket_number(d, -2 * total) / denominator


def super_prefactor(d: Deformation, total: int, variant: str = "rnb2") -> Scalar:
    if variant not in PREFACTOR_VARIANTS:
        raise ValueError(f"unknown prefactor variant '{variant}'; expected one of {', '.join(PREFACTOR_VARIANTS)}")
    k = -total - 1 if variant == "rnb2" else total - 1
    denominator = 2 * bracket_number(d, k)
    if denominator.is_zero:
        raise SingularPrefactor(f"[{k}] = 0 in the {variant} prefactor over '{d.name}'")
    return bracket_number(d, -2 * total - 1) / denominator


def _word(kinds_and_indices: Sequence[Tuple[str, int]]) -> Word:
    word: List = []
    for kind, m in kinds_and_indices:
        if kind == "G":
            word.append(MulTheta())
        word.extend((MulT(m), Delta()))
    return tuple(word)


def vandermonde(d: Deformation, ms: Sequence[int]) -> Scalar:
    """prod_{i<j} ([m_i] - [m_j])."""
    value = PQ.one()
    for i, j in itertools.combinations(range(len(ms)), 2):
        value = value * (bracket_number(d, ms[i]) - bracket_number(d, ms[j]))
    return value


def _mixed_product(d: Deformation, ms: Sequence[int], shifted: int) -> Scalar:
    """prod_i ([m_i] - [shifted])."""
    value = PQ.one()
    for m in ms:
        value = value * (bracket_number(d, m) - bracket_number(d, shifted))
    return value


def n_bracket_bosonic(d: Deformation, ms: Sequence[int]) -> GradedOperator:
    """Levi-Civita sum of l-products weighted by phi^(sum_j (floor(n/2)-j+1) m_ij)."""
    n = len(ms)
    _check_arity(n)
    half = n // 2
    sign_of_product = (-1) ** n
    pairs = []
    for perm, sign in signed_permutations(n):
        exponent = sum((half - j + 1) * ms[i] for j, i in enumerate(perm, start=1))
        pairs.append((d.phi ** exponent * (sign * sign_of_product), _word([("l", ms[i]) for i in perm])))
    result = merge_terms(d, 0, pairs)
    if n % 2 == 0:
        result = scale(bosonic_prefactor(d, sum(ms)), result)
    return result


def closed_form_bosonic_scalar(d: Deformation, ms: Sequence[int]) -> Scalar:
    n = len(ms)
    _check_arity(n)
    total = sum(ms)
    value = (PQ.gen("q") - PQ.gen("p")) ** comb(n - 1, 2)
    value = value * d.phi ** (-((n - 1) // 2) * total) * vandermonde(d, ms)
    if n % 2 == 0:
        value = value * bosonic_prefactor(d, total)
    return value


def closed_form_bosonic(d: Deformation, ms: Sequence[int]) -> GradedOperator:
    return scale(closed_form_bosonic_scalar(d, ms), l_op(d, sum(ms)))


def _super_beta(half: int, bosonic: Sequence[int], fermionic: int, j: int) -> int:
    before = sum((half - k + 1) * bosonic[k - 1] for k in range(1, j + 1))
    after = sum((half - k) * bosonic[k - 1] for k in range(j + 1, len(bosonic) + 1))
    return before + (half - 1) * (fermionic + 1) + after


def n_bracket_super(d: Deformation, ms: Sequence[int]) -> GradedOperator:
    """Super n-bracket: ms holds n-1 bosonic indices followed by the fermionic one.

    The G slot is inserted at every position j; the even-n prefactor is the
    rnb2 reading.
    """
    n = len(ms)
    _check_arity(n)
    half = n // 2
    bosonic, fermionic = list(ms[:-1]), ms[-1]
    sign_of_product = (-1) ** n
    pairs = []
    for j in range(n):
        position_sign = (-1) ** (n - 1 + j)
        for perm, sign in signed_permutations(n - 1):
            ordered = [bosonic[i] for i in perm]
            beta = _super_beta(half, ordered, fermionic, j)
            slots = [("l", m) for m in ordered[:j]] + [("G", fermionic)] + [("l", m) for m in ordered[j:]]
            coeff = d.phi ** beta * (position_sign * sign * sign_of_product)
            pairs.append((coeff, _word(slots)))
    result = merge_terms(d, 1, pairs)
    if n % 2 == 0:
        result = scale(super_prefactor(d, sum(ms), "rnb2"), result)
    return result


def closed_form_super_scalar(d: Deformation, ms: Sequence[int], variant: str = "rnb2") -> Scalar:
    n = len(ms)
    _check_arity(n)
    total = sum(ms)
    bosonic, fermionic = list(ms[:-1]), ms[-1]
    value = (PQ.gen("q") - PQ.gen("p")) ** comb(n - 1, 2)
    value = value / d.phi ** (((n - 1) // 2) * total + 1)
    value = value * vandermonde(d, bosonic) * _mixed_product(d, bosonic, fermionic + 1)
    if n % 2 == 0:
        value = value * super_prefactor(d, total, variant)
    return value


def closed_form_super(d: Deformation, ms: Sequence[int], variant: str = "rnb2") -> GradedOperator:
    return scale(closed_form_super_scalar(d, ms, variant), g_op(d, sum(ms)))


def witt3_display(d: Deformation, ms: Sequence[int]) -> GradedOperator:
    """(q-p)/phi^S ([m1]-[m2])([m1]-[m3])([m2]-[m3]) l_S."""
    if len(ms) != 3:
        raise UnsupportedArity(f"the Witt 3-algebra display takes 3 indices, got {len(ms)}")
    q_minus_p = PQ.gen("q") - PQ.gen("p")
    coeff = q_minus_p / d.phi ** sum(ms) * vandermonde(d, ms)
    return scale(coeff, l_op(d, sum(ms)))


def super_witt3_display(d: Deformation, ms: Sequence[int]) -> GradedOperator:
    """(q-p)([m1]-[m2])([m1]-[m3+1])([m2]-[m3+1]) / (2 phi^(S+3)) G_S, literal display form."""
    if len(ms) != 3:
        raise UnsupportedArity(f"the super Witt 3-algebra display takes 3 indices, got {len(ms)}")
    m1, m2, m3 = ms
    q_minus_p = PQ.gen("q") - PQ.gen("p")
    coeff = q_minus_p * vandermonde(d, (m1, m2)) * _mixed_product(d, (m1, m2), m3 + 1)
    coeff = coeff / (2 * d.phi ** (sum(ms) + 3))
    return scale(coeff, g_op(d, sum(ms)))


def _central_charge(d: Deformation) -> Scalar:
    return PQ.gen(d.central_charge_symbol)


def _tau_sum(d: Deformation, m: int) -> Scalar:
    """tau1^m + tau2^m, the regularized [2m]/[m]."""
    tau = d.require_tau()
    value = tau.tau1 ** m + tau.tau2 ** m
    if value.is_zero:
        raise SingularPrefactor(f"tau1^{m} + tau2^{m} vanishes over '{d.name}'")
    return value


def cubic(d: Deformation, m: int) -> Scalar:
    """[m-1][m][m+1]."""
    return bracket_number(d, m - 1) * bracket_number(d, m) * bracket_number(d, m + 1)


def pair_factor(d: Deformation, m: int) -> Scalar:
    """phi^-m [m-1][m][m+1] / (tau1^m + tau2^m)."""
    return d.phi ** (-m) * cubic(d, m) / _tau_sum(d, m)


def paired_sum(d: Deformation, values: Sequence[int], printed: bool = False) -> Scalar:
    """Levi-Civita sum of prod_l pair_factor(v_{i_(2l-1)}) delta(v_{i_(2l-1)} + v_{i_(2l)}).

    With ``printed`` the phi power and the tau ratio read the unpermuted
    index v_(2l-1), the cubic factor the permuted one.
    """
    total = PQ.zero()
    for perm, sign in signed_permutations(len(values)):
        ordered = [values[i] for i in perm]
        firsts = ordered[0::2]
        if any(a + b != 0 for a, b in zip(firsts, ordered[1::2])):
            continue
        term = PQ.constant(sign)
        for slot, m in enumerate(firsts):
            if printed:
                anchor = values[2 * slot]
                term = term * d.phi ** (-anchor) * cubic(d, m) / _tau_sum(d, anchor)
            else:
                term = term * pair_factor(d, m)
        total = total + term
    return total


def _check_even_arity(ms: Sequence[int]) -> int:
    if len(ms) % 2 or not 4 <= len(ms) <= MAX_ARITY:
        raise UnsupportedArity(f"Virasoro 2n-brackets take 4 or 6 indices, got {len(ms)}")
    return len(ms) // 2


def central_term_2n(d: Deformation, ms: Sequence[int], printed: bool = False) -> Scalar:
    n = _check_even_arity(ms)
    d.require_tau()
    return _central_charge(d) * paired_sum(d, ms, printed) / (6 * 2 ** n * factorial(n))


def g_term(d: Deformation, ms: Sequence[int]) -> GradedOperator:
    """(q-p)^C(2n-1,2) / phi^((n-1)S) times the prefactor and Vandermonde product, on l_S."""
    _check_even_arity(ms)
    return closed_form_bosonic(d, ms)


def virasoro_2n_bracket(d: Deformation, ms: Sequence[int]) -> ExtendedOperator:
    return ExtendedOperator(g_term(d, ms), central_term_2n(d, ms))


def virasoro_example(d: Deformation, ms: Sequence[int], printed: bool = False) -> ExtendedOperator:
    """The 4- and 6-bracket instances with their explicit constants.

    4 indices: (q-p)^3 / phi^S and c/48; 6 indices: (q-p)^10 / phi^(2S) and c/288.
    """
    n = _check_even_arity(ms)
    power, phi_multiple, denominator = {2: (3, 1, 48), 3: (10, 2, 288)}[n]
    total = sum(ms)
    q_minus_p = PQ.gen("q") - PQ.gen("p")
    coeff = q_minus_p ** power / d.phi ** (phi_multiple * total) * bosonic_prefactor(d, total) * vandermonde(d, ms)
    central = _central_charge(d) * paired_sum(d, ms, printed) / denominator
    return ExtendedOperator(scale(coeff, l_op(d, total)), central)


def super_virasoro_central(d: Deformation, m: int) -> Scalar:
    """C(m) = c phi^m [m+1][m][m-1] / (6 (tau1^m + tau2^m))."""
    return _central_charge(d) * d.phi ** m * cubic(d, m) / (6 * _tau_sum(d, m))


def super_virasoro_central_raw(d: Deformation, m: int) -> Scalar:
    """c phi^m [m] [m+1][m][m-1] / (6 [2m]); needs [2m] != 0."""
    double = bracket_number(d, 2 * m)
    if double.is_zero:
        raise SingularPrefactor(f"[{2 * m}] = 0 in the raw central coefficient over '{d.name}'")
    return _central_charge(d) * d.phi ** m * bracket_number(d, m) * cubic(d, m) / (6 * double)


def super_virasoro_binary(d: Deformation, m1: int, m2: int, kind: str = "ll") -> ExtendedOperator:
    if kind == "ll":
        op = scale(bracket_number(d, m1) - bracket_number(d, m2), l_op(d, m1 + m2))
        gated = m1 + m2 == 0
    elif kind == "lG":
        op = scale(bracket_number(d, m1) - bracket_number(d, m2 + 1), g_op(d, m1 + m2))
        gated = m1 + m2 + 1 == 0
    else:
        raise ValueError(f"kind must be 'll' or 'lG', got '{kind}'")
    central = super_virasoro_central(d, m1) if gated else PQ.zero()
    return ExtendedOperator(op, central)


def super_virasoro_binary_lhs(d: Deformation, m1: int, m2: int, kind: str = "ll") -> GradedOperator:
    """Weighted bracket of the operator realizations, without central part."""
    second = Generator("l" if kind == "ll" else "G", m2)
    return generator_bracket(d, Generator("l", m1), second, l_op(d, m1), second.operator(d))


def f_term(d: Deformation, ms: Sequence[int], variant: str = "rnb2") -> GradedOperator:
    n = _check_even_arity(ms)
    total = sum(ms)
    bosonic, fermionic = list(ms[:-1]), ms[-1]
    q_minus_p = PQ.gen("q") - PQ.gen("p")
    coeff = q_minus_p ** comb(2 * n - 1, 2) * d.phi ** ((n - 1) * total - 1)
    coeff = coeff * super_prefactor(d, total, variant)
    coeff = coeff * vandermonde(d, bosonic) * _mixed_product(d, bosonic, fermionic + 1)
    return scale(coeff, g_op(d, total))


def cs_term(d: Deformation, ms: Sequence[int]) -> Scalar:
    n = _check_even_arity(ms)
    d.require_tau()
    bosonic, fermionic = list(ms[:-1]), ms[-1]
    normalizer = 6 * 2 ** (n - 1) * factorial(n - 1)
    total = PQ.zero()
    for k, m in enumerate(bosonic, start=1):
        if m + fermionic + 1 != 0:
            continue
        rest = bosonic[: k - 1] + bosonic[k:]
        term = pair_factor(d, m) * paired_sum(d, rest) * (-1) ** (k + 1)
        total = total + term
    return _central_charge(d) * total / normalizer


def super_virasoro_2n_fermionic(d: Deformation, ms: Sequence[int], variant: str = "rnb2") -> ExtendedOperator:
    return ExtendedOperator(f_term(d, ms, variant), cs_term(d, ms))


def rho(d: Deformation, g: Generator) -> GradedOperator:
    tau = d.require_tau()
    k = g.index + 1 if g.kind == "G" else g.index
    return scale(tau.tau1 ** k + tau.tau2 ** k, g.operator(d))


def jacobi_cyclic_sum(d: Deformation, triple: Sequence[Generator]) -> GradedOperator:
    """sum over cyclic (i, j, l) of (-1)^(|A_i||A_l|) [rho(A_i), [A_j, A_l]]."""
    if len(triple) != 3:
        raise ValueError(f"the super Jacobi sum takes 3 generators, got {len(triple)}")
    terms = []
    for shift in range(3):
        a_i, a_j, a_l = (triple[(shift + k) % 3] for k in range(3))
        inner = generator_bracket(d, a_j, a_l, a_j.operator(d), a_l.operator(d))
        inner_kind = "G" if (a_j.parity + a_l.parity) % 2 else "l"
        inner_gen = Generator(inner_kind, a_j.index + a_l.index)
        outer = generator_bracket(d, a_i, inner_gen, rho(d, a_i), inner)
        terms.append(((-1) ** (a_i.parity * a_l.parity), outer))
    return lin_comb(terms)


def verify_super_jacobi(
    d: Deformation, triple: Sequence[Generator], w: int = 4, must_pass: bool = False
) -> IdentityReport:
    cell = Cell(
        "super-jacobi",
        d.name,
        tuple(g.label() for g in triple),
        {"basis_window": w},
        JACOBI_CONVENTIONS,
        must_pass,
    )

    def compute() -> IdentityReport:
        total = jacobi_cyclic_sum(d, triple)
        return cell.compare_operators(total, zero_operator(d, total.parity), w)

    return cell.guard(compute)
