"""
Verification suites.

Each suite expands into independent cells (one identity at one index tuple);
a cell evaluates to an IdentityReport. SuiteRunner runs the cells, on a
thread pool when jobs > 1, and returns reports in suite order, then by
identity id and indices, so the same config always gives the same report.
"""

import itertools
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import partial
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .brackets import (
    Generator,
    anticommutator,
    central_term_2n,
    chi_weight,
    closed_form_bosonic,
    closed_form_super,
    cs_term,
    n_bracket_bosonic,
    n_bracket_super,
    super_virasoro_2n_fermionic,
    super_virasoro_binary,
    super_virasoro_binary_lhs,
    super_virasoro_central,
    super_virasoro_central_raw,
    super_witt3_display,
    tau_weight,
    verify_super_jacobi,
    virasoro_2n_bracket,
    virasoro_example,
    weighted_commutator,
    witt3_display,
)
from .config import IndexWindow
from .constraints import (
    ARIK_COON_SUBSTITUTION,
    ARIK_COON_TAU,
    FORMAL_TAU,
    JAGANNATHAN_SRINIVASA_SUBSTITUTION,
    JAGANNATHAN_SRINIVASA_TAU,
    Comparison,
    ToyOperator,
    Truncation,
    bell_polynomial,
    bell_polynomial_series,
    dictionary_check,
    printed_consistency,
    substitution_consistency,
    tau_identity_holds,
    toy_commutator,
    toy_n_bracket,
    toy_product,
)
from .debuglog import NULL_LOG, DebugLog
from .deformation import Deformation, bracket_number, classical_limit, negative_index_holds, tau_form
from .errors import EvaluationAtPole
from .exactnum import PQ
from .operators import ExtendedOperator, compose, g_op, l_op, scale, zero_operator
from .report import Cell, IdentityReport, summarize
from .superspace import SuperElement, check_delta_decomposition, check_sigma_endomorphism, delta, sigma, super_mul

Thunk = Callable[[], IdentityReport]

MUST_PASS_BINARY_PRESETS = ("jagannathan-srinivasa", "arik-coon")
BINARY_RANGE = range(-3, 4)
PAIR_RANGE = range(-4, 5)
NARY_RANGE = range(-2, 3)
NARY_WINDOW = 6
BINARY_WINDOW = 8
JACOBI_WINDOW = 4
TOY_LEVELS = (1, 2, 3)
SPECIALIZATION_RANGE = range(-2, 3)
DICTIONARY_LEVELS = (1, 2)
DICTIONARY_RANGE = range(0, 4)
DICTIONARY_GAMMAS = (0, 1)
DEFAULT_TRUNCATION = Truncation(8, 3)
BELL_MAX = 8
TOY_FORMULAS = ("prod1", "prod2", "scrto", "scrgo")

TOY_CONVENTIONS = ("T^a_m = -[m]_a z^m", "formal (tau1, tau2) field")
DICTIONARY_CONVENTIONS = (
    "k! d/dt_k <-> x^k, second-order terms as products of markers",
    "right-hand side with m+gamma, n+gamma in the coefficients",
)


@dataclass(frozen=True)
class SuiteContext:
    deformation: Deformation
    window: Optional[IndexWindow] = None
    prefactor_variant: str = "rnb2"
    truncation: Optional[Truncation] = None
    debug: DebugLog = NULL_LOG

    def indices(self, default: Iterable[int]) -> Tuple[int, ...]:
        return self.window.indices() if self.window else tuple(default)

    def basis_window(self, default: int) -> int:
        return self.window.basis_window if self.window else default

    @property
    def dictionary_truncation(self) -> Truncation:
        return self.truncation or DEFAULT_TRUNCATION

    @property
    def name(self) -> str:
        return self.deformation.name


def _compare(cell: Cell, comparison: Comparison) -> IdentityReport:
    if comparison.holds:
        return cell.passed()
    return cell.failed(
        {
            "quantity": comparison.label,
            "lhs": comparison.lhs.render(),
            "rhs": comparison.rhs.render(),
            "difference": comparison.difference().render(),
        }
    )


def _compare_extended(cell: Cell, lhs: ExtendedOperator, rhs: ExtendedOperator, w: int) -> IdentityReport:
    report = cell.compare_operators(lhs.op, rhs.op, w)
    if not report.passed:
        return report
    return cell.compare_scalars(lhs.central, rhs.central, "central coefficient")


# deformed numbers


def _tau_form_cell(ctx: SuiteContext, n: int) -> IdentityReport:
    d = ctx.deformation
    cell = Cell("deformed-numbers", ctx.name, (n,), must_pass=True)
    return cell.guard(lambda: cell.compare_scalars(bracket_number(d, n), tau_form(d, n), f"[{n}]"))


def _zero_cell(ctx: SuiteContext) -> IdentityReport:
    cell = Cell("deformed-numbers:zero", ctx.name, (0,), must_pass=True)
    return cell.compare_scalars(bracket_number(ctx.deformation, 0), PQ.zero(), "[0]")


def _classical_limit_cell(ctx: SuiteContext, n: int) -> IdentityReport:
    cell = Cell(
        "deformed-numbers:classical-limit", ctx.name, (n,), must_pass=ctx.name == "jagannathan-srinivasa"
    )
    try:
        value = classical_limit(ctx.deformation, n)
    except EvaluationAtPole as e:
        return cell.skipped(f"EvaluationAtPole: {e}")
    return cell.compare_scalars(value, PQ.constant(n), f"[{n}] at p=q=1")


def _negative_index_cell(ctx: SuiteContext, n: int) -> IdentityReport:
    cell = Cell("deformed-numbers:negative-index", ctx.name, (n,), must_pass=True)
    d = ctx.deformation
    return cell.guard(lambda: cell.check(negative_index_holds(d, n), {"quantity": f"[-{n}] + (tau1 tau2)^-{n} [{n}]"}))


def deformed_numbers_suite(ctx: SuiteContext) -> List[Thunk]:
    thunks: List[Thunk] = [partial(_zero_cell, ctx)]
    for n in range(-6, 7):
        thunks.append(partial(_tau_form_cell, ctx, n))
        thunks.append(partial(_classical_limit_cell, ctx, n))
    thunks.extend(partial(_negative_index_cell, ctx, n) for n in range(1, 7))
    return thunks


# superspace


def _basis(n: int, odd: bool) -> SuperElement:
    return SuperElement.basis(n, odd)


def _sigma_derivation_cell(ctx: SuiteContext, m: int, n: int, odd_a: bool, odd_b: bool) -> IdentityReport:
    d = ctx.deformation
    cell = Cell("sigma-derivation", ctx.name, (m, n, int(odd_a), int(odd_b)))
    a, b = _basis(m, odd_a), _basis(n, odd_b)
    lhs = delta(d, super_mul(a, b))
    rhs = super_mul(delta(d, a), b) + super_mul(sigma(d, a), delta(d, b))
    return cell.compare_elements(lhs, rhs, "Delta(ab) vs Delta(a) b + sigma(a) Delta(b)")


def _structure_cell(ctx: SuiteContext, m: int, n: int, odd_a: bool, odd_b: bool) -> IdentityReport:
    d = ctx.deformation
    a, b = _basis(m, odd_a), _basis(n, odd_b)
    cell = Cell("sigma-derivation:structure", ctx.name, (m, n, int(odd_a), int(odd_b)), must_pass=True)
    ok = check_delta_decomposition(d, a) and check_sigma_endomorphism(d, a, b)
    return cell.check(ok, {"quantity": "Delta = d_t + theta d_theta and sigma(ab) = sigma(a) sigma(b)"})


def sigma_derivation_suite(ctx: SuiteContext) -> List[Thunk]:
    thunks: List[Thunk] = []
    grid = ctx.indices(PAIR_RANGE)
    for m, n in itertools.product(grid, grid):
        for odd_a, odd_b in itertools.product((False, True), repeat=2):
            thunks.append(partial(_sigma_derivation_cell, ctx, m, n, odd_a, odd_b))
            thunks.append(partial(_structure_cell, ctx, m, n, odd_a, odd_b))
    return thunks


# binary brackets


def _crochet1_cell(ctx: SuiteContext, m1: int, m2: int, w: int) -> IdentityReport:
    d = ctx.deformation
    cell = Cell("crochet1", ctx.name, (m1, m2), {"basis_window": w}, ("chi weights, (1,1) when m1 = m2",),
                ctx.name in MUST_PASS_BINARY_PRESETS)

    def compute() -> IdentityReport:
        lhs = weighted_commutator(l_op(d, m1), l_op(d, m2), chi_weight(d, m1, m2))
        rhs = scale(bracket_number(d, m1) - bracket_number(d, m2), l_op(d, m1 + m2))
        return cell.compare_operators(lhs, rhs, w)

    return cell.guard(compute)


def _crochet2_cell(ctx: SuiteContext, m1: int, m2: int, w: int) -> IdentityReport:
    d = ctx.deformation
    cell = Cell("crochet2", ctx.name, (m1, m2), {"basis_window": w}, ("tau weights",),
                ctx.name in MUST_PASS_BINARY_PRESETS)

    def compute() -> IdentityReport:
        lhs = weighted_commutator(l_op(d, m1), g_op(d, m2), tau_weight(d, m1, m2))
        rhs = scale(bracket_number(d, m1) - bracket_number(d, m2 + 1), g_op(d, m1 + m2))
        return cell.compare_operators(lhs, rhs, w)

    return cell.guard(compute)


def _crochet3_cell(ctx: SuiteContext, m1: int, m2: int, w: int) -> IdentityReport:
    d = ctx.deformation
    cell = Cell("crochet3", ctx.name, (m1, m2), {"basis_window": w}, must_pass=True)
    first, second = g_op(d, m1), g_op(d, m2)
    report = cell.compare_operators(anticommutator(first, second), zero_operator(d), w)
    if not report.passed:
        return report
    return cell.compare_operators(compose(first, second), zero_operator(d), w)


def crochet1_suite(ctx: SuiteContext) -> List[Thunk]:
    grid, w = ctx.indices(BINARY_RANGE), ctx.basis_window(BINARY_WINDOW)
    return [partial(_crochet1_cell, ctx, m1, m2, w) for m1, m2 in itertools.product(grid, grid)]


def crochet2_suite(ctx: SuiteContext) -> List[Thunk]:
    grid, w = ctx.indices(BINARY_RANGE), ctx.basis_window(BINARY_WINDOW)
    return [partial(_crochet2_cell, ctx, m1, m2, w) for m1, m2 in itertools.product(grid, grid)]


def crochet3_suite(ctx: SuiteContext) -> List[Thunk]:
    grid, w = ctx.indices(PAIR_RANGE), ctx.basis_window(BINARY_WINDOW)
    return [partial(_crochet3_cell, ctx, m1, m2, w) for m1, m2 in itertools.product(grid, grid)]


# n-brackets


def _witt3_cell(ctx: SuiteContext, ms: Tuple[int, ...], w: int) -> IdentityReport:
    d = ctx.deformation
    cell = Cell("witt3", ctx.name, ms, {"basis_window": w})
    return cell.guard(lambda: cell.compare_operators(closed_form_bosonic(d, ms), witt3_display(d, ms), w))


def _super_witt3_cell(ctx: SuiteContext, ms: Tuple[int, ...], w: int) -> IdentityReport:
    d = ctx.deformation
    cell = Cell("witt3:super", ctx.name, ms, {"basis_window": w}, ("last index fermionic",))
    return cell.guard(lambda: cell.compare_operators(closed_form_super(d, ms), super_witt3_display(d, ms), w))


def witt3_suite(ctx: SuiteContext) -> List[Thunk]:
    grid, w = ctx.indices(NARY_RANGE), ctx.basis_window(NARY_WINDOW)
    thunks: List[Thunk] = [partial(_witt3_cell, ctx, ms, w) for ms in itertools.combinations(grid, 3)]
    for pair in itertools.combinations(grid, 2):
        thunks.extend(partial(_super_witt3_cell, ctx, pair + (m,), w) for m in grid)
    return thunks


def _rnb1_cell(ctx: SuiteContext, ms: Tuple[int, ...], w: int) -> IdentityReport:
    d = ctx.deformation
    cell = Cell("rcom1-vs-rnb1", ctx.name, ms, {"basis_window": w}, ("even-n prefactor tau-regularized",))
    return cell.guard(lambda: cell.compare_operators(n_bracket_bosonic(d, ms), closed_form_bosonic(d, ms), w))


def _rnb2_cell(ctx: SuiteContext, ms: Tuple[int, ...], variant: str, w: int) -> IdentityReport:
    d = ctx.deformation
    identity = "rcom2-vs-rnb2" if len(ms) % 2 else f"rcom2-vs-rnb2:{variant}"
    cell = Cell(identity, ctx.name, ms, {"basis_window": w}, ("last index fermionic", f"closed-form prefactor {variant}"))
    return cell.guard(lambda: cell.compare_operators(n_bracket_super(d, ms), closed_form_super(d, ms, variant), w))


def rnb1_suite(ctx: SuiteContext) -> List[Thunk]:
    grid, w = ctx.indices(NARY_RANGE), ctx.basis_window(NARY_WINDOW)
    thunks: List[Thunk] = [partial(_rnb1_cell, ctx, ms, w) for ms in itertools.permutations(grid, 3)]
    thunks.extend(partial(_rnb1_cell, ctx, ms, w) for ms in itertools.combinations(grid, 4))
    return thunks


def rnb2_suite(ctx: SuiteContext) -> List[Thunk]:
    grid, w = ctx.indices(NARY_RANGE), ctx.basis_window(NARY_WINDOW)
    thunks: List[Thunk] = []
    for pair in itertools.permutations(grid, 2):
        thunks.extend(partial(_rnb2_cell, ctx, pair + (m,), "rnb2", w) for m in grid)
    for triple in itertools.combinations(grid, 3):
        for m in grid:
            thunks.extend(partial(_rnb2_cell, ctx, triple + (m,), variant, w) for variant in ("rnb2", "rcom2"))
    return thunks


def _antisymmetry_cell(ctx: SuiteContext, ms: Tuple[int, ...], i: int, w: int) -> IdentityReport:
    d = ctx.deformation
    swapped = list(ms)
    swapped[i], swapped[i + 1] = swapped[i + 1], swapped[i]
    cell = Cell("antisymmetry", ctx.name, ms + (f"swap {i}",), {"basis_window": w}, must_pass=True)

    def compute() -> IdentityReport:
        return cell.compare_operators(n_bracket_bosonic(d, swapped), scale(-1, n_bracket_bosonic(d, ms)), w)

    return cell.guard(compute)


def antisymmetry_suite(ctx: SuiteContext) -> List[Thunk]:
    grid, w = ctx.indices(NARY_RANGE), ctx.basis_window(NARY_WINDOW)
    thunks: List[Thunk] = []
    for n in (3, 4):
        for ms in itertools.combinations(grid, n):
            thunks.extend(partial(_antisymmetry_cell, ctx, ms, i, w) for i in range(n - 1))
    return thunks


# Virasoro and super Virasoro

EXAMPLE_FOUR = (1, -1, 2, -2)
EXAMPLE_SIX = (1, -1, 2, -2, 3, -3)


def _example_cell(ctx: SuiteContext, ms: Tuple[int, ...], w: int) -> IdentityReport:
    d = ctx.deformation
    cell = Cell("virasoro-2n", ctx.name, ms, {"basis_window": w}, ("central factors on the permuted index",), True)
    return cell.guard(lambda: _compare_extended(cell, virasoro_2n_bracket(d, ms), virasoro_example(d, ms), w))


def _printed_central_cell(ctx: SuiteContext, ms: Tuple[int, ...]) -> IdentityReport:
    d = ctx.deformation
    cell = Cell("virasoro-2n:printed-central", ctx.name, ms, conventions=("phi and tau ratio on the unpermuted index",))
    return cell.guard(
        lambda: cell.compare_scalars(central_term_2n(d, ms), central_term_2n(d, ms, printed=True), "central")
    )


def _central_antisymmetry_cell(ctx: SuiteContext, ms: Tuple[int, ...], i: int) -> IdentityReport:
    d = ctx.deformation
    swapped = list(ms)
    swapped[i], swapped[i + 1] = swapped[i + 1], swapped[i]
    cell = Cell("virasoro-2n:central-antisymmetry", ctx.name, ms + (f"swap {i}",), must_pass=True)
    return cell.guard(lambda: cell.compare_scalars(central_term_2n(d, swapped), -central_term_2n(d, ms), "central"))


def virasoro_suite(ctx: SuiteContext) -> List[Thunk]:
    w = ctx.basis_window(NARY_WINDOW)
    thunks: List[Thunk] = []
    for ms in sorted(set(itertools.permutations(EXAMPLE_FOUR))):
        thunks.append(partial(_example_cell, ctx, ms, w))
        thunks.append(partial(_printed_central_cell, ctx, ms))
        thunks.extend(partial(_central_antisymmetry_cell, ctx, ms, i) for i in range(3))
    for shift in range(0, 6, 2):
        ms = EXAMPLE_SIX[shift:] + EXAMPLE_SIX[:shift]
        thunks.append(partial(_example_cell, ctx, ms, w))
    return thunks


def _gsva_operator_cell(ctx: SuiteContext, m1: int, m2: int, kind: str, w: int) -> IdentityReport:
    d = ctx.deformation
    cell = Cell(f"gsva:{kind}", ctx.name, (m1, m2), {"basis_window": w})

    def compute() -> IdentityReport:
        lhs = super_virasoro_binary_lhs(d, m1, m2, kind)
        return cell.compare_operators(lhs, super_virasoro_binary(d, m1, m2, kind).op, w)

    return cell.guard(compute)


def _gsva_raw_cell(ctx: SuiteContext, m: int) -> IdentityReport:
    d = ctx.deformation
    cell = Cell("gsva:central-raw", ctx.name, (m,), conventions=("[2m]/[m] = tau1^m + tau2^m",))
    return cell.guard(
        lambda: cell.compare_scalars(super_virasoro_central(d, m), super_virasoro_central_raw(d, m), f"C({m})")
    )


def _gsva_antisymmetry_cell(ctx: SuiteContext, m: int) -> IdentityReport:
    d = ctx.deformation
    cell = Cell("gsva:central-antisymmetry", ctx.name, (m,))
    return cell.guard(
        lambda: cell.compare_scalars(super_virasoro_central(d, -m), -super_virasoro_central(d, m), f"C(-{m})")
    )


def gsva_suite(ctx: SuiteContext) -> List[Thunk]:
    grid, w = ctx.indices(BINARY_RANGE), ctx.basis_window(BINARY_WINDOW)
    thunks: List[Thunk] = []
    for m1, m2 in itertools.product(grid, grid):
        thunks.extend(partial(_gsva_operator_cell, ctx, m1, m2, kind, w) for kind in ("ll", "lG"))
    for m in grid:
        thunks.append(partial(_gsva_raw_cell, ctx, m))
        if m > 0:
            thunks.append(partial(_gsva_antisymmetry_cell, ctx, m))
    return thunks


def _sv2n_cell(ctx: SuiteContext, ms: Tuple[int, ...], w: int) -> IdentityReport:
    d = ctx.deformation
    variant = ctx.prefactor_variant
    cell = Cell("sv2n", ctx.name, ms, {"basis_window": w}, ("last index fermionic", f"f-term prefactor {variant}"))

    def compute() -> IdentityReport:
        closed = super_virasoro_2n_fermionic(d, ms, variant)
        return cell.compare_operators(n_bracket_super(d, ms), closed.op, w)

    return cell.guard(compute)


def _cs_antisymmetry_cell(ctx: SuiteContext, ms: Tuple[int, ...]) -> IdentityReport:
    d = ctx.deformation
    swapped = (ms[1], ms[0]) + ms[2:]
    cell = Cell("sv2n:cs-antisymmetry", ctx.name, ms, conventions=("last index fermionic",))
    return cell.guard(lambda: cell.compare_scalars(cs_term(d, swapped), -cs_term(d, ms), "CS"))


def sv2n_suite(ctx: SuiteContext) -> List[Thunk]:
    grid, w = ctx.indices(NARY_RANGE), ctx.basis_window(NARY_WINDOW)
    thunks: List[Thunk] = []
    for triple in itertools.combinations(grid, 3):
        for m in grid:
            thunks.append(partial(_sv2n_cell, ctx, triple + (m,), w))
            thunks.append(partial(_cs_antisymmetry_cell, ctx, triple + (m,)))
    return thunks


def _canonical_rotation(triple: Tuple[Generator, ...]) -> bool:
    keys = [tuple((g.kind, g.index) for g in triple[k:] + triple[:k]) for k in range(3)]
    return keys[0] == min(keys)


def super_jacobi_suite(ctx: SuiteContext) -> List[Thunk]:
    grid, w = ctx.indices(NARY_RANGE), ctx.basis_window(JACOBI_WINDOW)
    generators = [Generator(kind, m) for kind in ("l", "G") for m in grid]
    return [
        partial(verify_super_jacobi, ctx.deformation, triple, w)
        for triple in itertools.product(generators, repeat=3)
        if _canonical_rotation(triple)
    ]


# toy model


def _tau_identity_cell(a: int, m: int, name: str) -> IdentityReport:
    cell = Cell("tau-identities", name, (a, m), must_pass=True)
    return cell.check(tau_identity_holds(FORMAL_TAU, a, m), {"quantity": f"[{m}]_{a} (tau1^{a} - tau2^{a})"})


def tau_identities_suite(ctx: SuiteContext) -> List[Thunk]:
    return [partial(_tau_identity_cell, a, m, ctx.name) for a in TOY_LEVELS for m in range(-4, 5)]


def _bell_cell(k: int, name: str) -> IdentityReport:
    cell = Cell("bell", name, (k,), must_pass=True)
    truncation = Truncation(max(k, 1), max(k, 1))
    recurrence, series = bell_polynomial(k, truncation), bell_polynomial_series(k, truncation)
    if recurrence == series:
        return cell.passed()
    return cell.failed({"quantity": f"B_{k}", "lhs": recurrence.render(), "rhs": series.render(),
                        "difference": (recurrence - series).render()})


def bell_suite(ctx: SuiteContext) -> List[Thunk]:
    return [partial(_bell_cell, k, ctx.name) for k in range(BELL_MAX + 1)]


def _toy_cell(identity: str, name: str, indices: Tuple[int, ...], compute: Callable[[], Comparison],
              must_pass: bool = False) -> IdentityReport:
    cell = Cell(identity, name, indices, conventions=TOY_CONVENTIONS, must_pass=must_pass)
    return _compare(cell, compute())


def _toy_grid(ctx: SuiteContext, levels: Sequence[int], default: Iterable[int]) -> List[Tuple[int, int, int, int]]:
    grid = ctx.indices(default)
    return [(a, b, m, n) for a in levels for b in levels for m in grid for n in grid]


def rpqprod_suite(ctx: SuiteContext) -> List[Thunk]:
    thunks: List[Thunk] = []
    for a, b, m, n in _toy_grid(ctx, TOY_LEVELS, BINARY_RANGE):
        for identity, fermionic in (("rpqprod1", False), ("rpqprod2", True)):
            compute = partial(toy_product, FORMAL_TAU, ToyOperator(a, m), ToyOperator(b, n, fermionic))
            thunks.append(partial(_toy_cell, identity, ctx.name, (a, b, m, n), compute))
    return thunks


def _commute_cell(name: str, a: int, b: int, m: int, n: int) -> IdentityReport:
    cell = Cell("scrto:commute", name, (a, b, m, n), conventions=TOY_CONVENTIONS, must_pass=True)
    lhs = toy_commutator(FORMAL_TAU, ToyOperator(a, m), ToyOperator(b, n)).lhs
    return cell.check(lhs.is_zero, {"quantity": "T^a_m T^b_n - T^b_n T^a_m", "difference": lhs.render()})


def scrto_suite(ctx: SuiteContext) -> List[Thunk]:
    thunks: List[Thunk] = []
    for a, b, m, n in _toy_grid(ctx, TOY_LEVELS, BINARY_RANGE):
        thunks.append(partial(_commute_cell, ctx.name, a, b, m, n))
        compute = partial(toy_commutator, FORMAL_TAU, ToyOperator(a, m), ToyOperator(b, n))
        thunks.append(partial(_toy_cell, "scrto", ctx.name, (a, b, m, n), compute))
    return thunks


def scrgo_suite(ctx: SuiteContext) -> List[Thunk]:
    thunks: List[Thunk] = []
    for a, b, m, n in _toy_grid(ctx, TOY_LEVELS, BINARY_RANGE):
        first, second = ToyOperator(a, m), ToyOperator(b, n, True)
        compute = partial(toy_commutator, FORMAL_TAU, first, second)
        thunks.append(partial(_toy_cell, "scrgo", ctx.name, (a, b, m, n), compute))
        if a == b:
            compute = partial(toy_commutator, FORMAL_TAU, first, second, True)
            thunks.append(partial(_toy_cell, "scrgo:equal-levels", ctx.name, (a, b, m, n), compute))
    return thunks


def _toy_nbracket_cell(name: str, a: int, ms: Tuple[int, ...], fermionic: bool) -> IdentityReport:
    result = toy_n_bracket(FORMAL_TAU, ms, a, fermionic)
    identity = "toy-nbracket:super" if fermionic else "toy-nbracket"
    cell = Cell(identity, name, (a,) + ms, conventions=TOY_CONVENTIONS + ("anomaly index m = m_1",))
    report = _compare(cell, Comparison("Levi-Civita sum vs closed form", result.levi_civita_sum, result.closed_form))
    return report


def _toy_ordered_cell(name: str, a: int, ms: Tuple[int, ...], fermionic: bool) -> IdentityReport:
    result = toy_n_bracket(FORMAL_TAU, ms, a, fermionic)
    identity = "toy-nbracket:super-ordered" if fermionic else "toy-nbracket:ordered"
    cell = Cell(identity, name, (a,) + ms, conventions=TOY_CONVENTIONS)
    return _compare(cell, Comparison("ordered product vs closed form", result.ordered_product, result.closed_form))


def toy_nbracket_suite(ctx: SuiteContext) -> List[Thunk]:
    grid = ctx.indices(NARY_RANGE)
    thunks: List[Thunk] = []
    for a in TOY_LEVELS:
        for ms in itertools.combinations(grid, 3):
            thunks.append(partial(_toy_nbracket_cell, ctx.name, a, ms, False))
            thunks.append(partial(_toy_ordered_cell, ctx.name, a, ms, False))
        for pair in itertools.combinations(grid, 2):
            for m in grid:
                thunks.append(partial(_toy_nbracket_cell, ctx.name, a, pair + (m,), True))
                thunks.append(partial(_toy_ordered_cell, ctx.name, a, pair + (m,), True))
    return thunks


def _dictionary_cell(ctx: SuiteContext, a: int, b: int, m: int, n: int, gamma: int, fermionic: bool) -> IdentityReport:
    truncation = ctx.dictionary_truncation
    identity = "dictionary:rpqprod2" if fermionic else "dictionary:rpqprod1"
    window = {"N": truncation.max_index, "D": truncation.max_degree}
    cell = Cell(identity, ctx.name, (a, b, m, n, gamma), window, DICTIONARY_CONVENTIONS)
    d = ctx.deformation
    return cell.guard(lambda: _compare(cell, dictionary_check(d, m, n, a, b, gamma, truncation, fermionic)))


def dictionary_suite(ctx: SuiteContext) -> List[Thunk]:
    grid = [m for m in ctx.indices(DICTIONARY_RANGE) if m >= 0]
    thunks: List[Thunk] = []
    for a, b in itertools.product(DICTIONARY_LEVELS, repeat=2):
        for m, n in itertools.product(grid, grid):
            for gamma in DICTIONARY_GAMMAS:
                thunks.extend(partial(_dictionary_cell, ctx, a, b, m, n, gamma, f) for f in (False, True))
    return thunks


def _specialization_suite(ctx: SuiteContext, family: str) -> List[Thunk]:
    assignment, tau = (
        (ARIK_COON_SUBSTITUTION, ARIK_COON_TAU) if family == "ac"
        else (JAGANNATHAN_SRINIVASA_SUBSTITUTION, JAGANNATHAN_SRINIVASA_TAU)
    )
    suite = "ac-specialization" if family == "ac" else "js-specialization"
    thunks: List[Thunk] = []
    for a, b, m, n in _toy_grid(ctx, TOY_LEVELS, SPECIALIZATION_RANGE):
        for kind in TOY_FORMULAS:
            substituted = partial(substitution_consistency, kind, a, b, m, n, assignment, tau)
            thunks.append(partial(_toy_cell, f"{suite}:{kind}", ctx.name, (a, b, m, n), substituted, True))
            printed = partial(printed_consistency, family, kind, a, b, m, n)
            thunks.append(partial(_toy_cell, f"{suite}:{kind}-printed", ctx.name, (a, b, m, n), printed))
    return thunks


SUITES: Dict[str, Callable[[SuiteContext], List[Thunk]]] = {
    "deformed-numbers": deformed_numbers_suite,
    "sigma-derivation": sigma_derivation_suite,
    "crochet1": crochet1_suite,
    "crochet2": crochet2_suite,
    "crochet3": crochet3_suite,
    "witt3": witt3_suite,
    "rcom1-vs-rnb1": rnb1_suite,
    "rcom2-vs-rnb2": rnb2_suite,
    "antisymmetry": antisymmetry_suite,
    "virasoro-2n": virasoro_suite,
    "gsva": gsva_suite,
    "sv2n": sv2n_suite,
    "super-jacobi": super_jacobi_suite,
    "tau-identities": tau_identities_suite,
    "bell": bell_suite,
    "rpqprod": rpqprod_suite,
    "scrto": scrto_suite,
    "scrgo": scrgo_suite,
    "toy-nbracket": toy_nbracket_suite,
    "dictionary": dictionary_suite,
    "ac-specialization": partial(_specialization_suite, family="ac"),
    "js-specialization": partial(_specialization_suite, family="js"),
}


class SuiteRunner:
    def __init__(self, ctx: SuiteContext, jobs: int = 1, debug: DebugLog = NULL_LOG):
        self.ctx = ctx
        self.jobs = jobs
        self.debug = debug

    def run(self, suite_ids: Sequence[str]) -> List[IdentityReport]:
        reports: List[IdentityReport] = []
        for suite_id in suite_ids:
            if suite_id not in SUITES:
                raise ValueError(f"unknown suite '{suite_id}'")
            reports.extend(self.run_suite(suite_id))
        return reports

    def run_suite(self, suite_id: str) -> List[IdentityReport]:
        started = time.monotonic()
        thunks = SUITES[suite_id](self.ctx)
        self.debug.emit(f"suite: {suite_id} start cells={len(thunks)} jobs={self.jobs}")
        if self.jobs > 1 and len(thunks) > 1:
            with ThreadPoolExecutor(max_workers=self.jobs) as pool:
                results = list(pool.map(lambda thunk: thunk(), thunks))
        else:
            results = [thunk() for thunk in thunks]
        results.sort(key=lambda r: r.sort_key())
        summary = summarize(results)
        self.debug.emit(
            f"suite: {suite_id} pass={summary['pass']} fail={summary['fail']} skipped={summary['skipped']} "
            f"elapsed={time.monotonic() - started:.2f}s"
        )
        return results
