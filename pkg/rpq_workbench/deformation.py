"""
Deformations (R, phi, optional tau pair) and the deformed numbers they define.

[n] is R evaluated at (p^n, q^n). When a tau pair is present the same value
is also available in the form (tau1^n - tau2^n)/(tau1 - tau2), which is what
makes the regularized ratios [2m]/[m] = tau1^m + tau2^m possible.
"""

import difflib
import os
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import yaml

from .debuglog import NULL_LOG, DebugLog
from .errors import (
    IndexOutOfRange,
    InvalidDeformation,
    MissingTauFactorization,
    NegativeIndex,
    UnknownPreset,
)
from .exactnum import PQ, XY, LaurentPoly, Scalar, substitute_powers

PRESETS_PATH = os.path.join(os.path.dirname(os.path.abspath(__file__)), "presets.yaml")
CONSISTENCY_WINDOW = range(-6, 7)
R_VARIABLES = ("x", "y", "p", "q")
PQ_VARIABLES = ("p", "q")


@dataclass(frozen=True)
class TauPair:
    tau1: Scalar
    tau2: Scalar


@dataclass(frozen=True)
class Deformation:
    name: str
    R: Scalar
    phi: Scalar
    tau: Optional[TauPair] = None
    notes: Tuple[str, ...] = ()
    central_charge_symbol: str = "c"

    @property
    def has_tau(self) -> bool:
        return self.tau is not None

    def require_tau(self) -> TauPair:
        if self.tau is None:
            raise MissingTauFactorization(f"deformation '{self.name}' has no tau factorization")
        return self.tau

    def with_phi(self, phi: Scalar) -> "Deformation":
        note = f"phi overridden to {phi.render()}"
        return replace(self, phi=phi, notes=self.notes + (note,))


@dataclass(frozen=True)
class InvariantCheck:
    name: str
    passed: bool
    detail: str = ""


@lru_cache(maxsize=4096)
def _bracket_number(d: Deformation, n: int) -> Scalar:
    return substitute_powers(d.R, {"x": ("p", n), "y": ("q", n)}, PQ)


def bracket_number(d: Deformation, n: int) -> Scalar:
    """[n] = R(p^n, q^n), exact. Memoized per (deformation, n)."""
    return _bracket_number(d, n)


def bracket_cache_info() -> Any:
    return _bracket_number.cache_info()


def tau_form(d: Deformation, n: int) -> Scalar:
    tau = d.require_tau()
    gap = tau.tau1 - tau.tau2
    if gap.is_zero:
        raise InvalidDeformation(f"deformation '{d.name}' has tau1 = tau2")
    return (tau.tau1 ** n - tau.tau2 ** n) / gap


def tau_polynomial(d: Deformation, n: int) -> Scalar:
    """Geometric-sum form tau1^(n-1) + tau1^(n-2) tau2 + ... + tau2^(n-1).

    Negative n uses [-k] = -(tau1 tau2)^(-k) [k].
    """
    tau = d.require_tau()
    if n == 0:
        return PQ.zero()
    k = abs(n)
    total = PQ.zero()
    for j in range(k):
        total = total + tau.tau1 ** (k - 1 - j) * tau.tau2 ** j
    if n < 0:
        return -((tau.tau1 * tau.tau2) ** n) * total
    return total


def classical_limit(d: Deformation, n: int) -> Scalar:
    """Value of [n] at p = q = 1, via the tau polynomial when one exists."""
    value = tau_polynomial(d, n) if d.has_tau else bracket_number(d, n)
    return substitute_powers(value, {"p": 1, "q": 1}, PQ)


def bracket_ratio_2m_over_m(d: Deformation, m: int) -> Scalar:
    tau = d.require_tau()
    return tau.tau1 ** m + tau.tau2 ** m


def deformed_factorial(d: Deformation, n: int) -> Scalar:
    if n < 0:
        raise NegativeIndex(f"factorial of negative index {n}")
    value = PQ.one()
    for k in range(1, n + 1):
        value = value * bracket_number(d, k)
    return value


def deformed_binomial(d: Deformation, m: int, n: int) -> Scalar:
    if not 0 <= n <= m:
        raise IndexOutOfRange(f"binomial needs 0 <= n <= m, got m={m} n={n}")
    return deformed_factorial(d, m) / (deformed_factorial(d, n) * deformed_factorial(d, m - n))


def negative_index_holds(d: Deformation, n: int) -> bool:
    """[-n] = -(tau1 tau2)^(-n) [n]; for Jagannathan-Srinivasa this is -(pq)^(-n) [n]."""
    tau = d.require_tau()
    expected = -((tau.tau1 * tau.tau2) ** (-n)) * bracket_number(d, n)
    return bracket_number(d, -n) == expected


def validate(d: Deformation) -> List[InvariantCheck]:
    checks: List[InvariantCheck] = []
    numerator = Scalar(XY, XY.sympy_field.new(d.R.value.numer))
    at_one = substitute_powers(numerator, {"x": 1, "y": 1}, PQ)
    checks.append(InvariantCheck("R(1,1)=0", at_one.is_zero, f"numerator at x=y=1 is {at_one.render()}"))
    phi_at_one = substitute_powers(d.phi, {"p": 1, "q": 1}, PQ)
    checks.append(InvariantCheck("phi(1,1)=1", phi_at_one == 1, f"phi(1,1) = {phi_at_one.render()}"))
    if d.tau is None:
        checks.append(InvariantCheck("tau-consistency", True, "no tau factorization; tau-dependent cells skip"))
        return checks
    for n in CONSISTENCY_WINDOW:
        if bracket_number(d, n) != tau_form(d, n):
            checks.append(
                InvariantCheck(
                    "tau-consistency",
                    False,
                    f"[{n}] = {bracket_number(d, n).render()} but tau form gives {tau_form(d, n).render()}",
                )
            )
            return checks
    checks.append(InvariantCheck("tau-consistency", True, "R(p^n,q^n) matches tau form for n in [-6, 6]"))
    return checks


def checked(d: Deformation, debug: DebugLog = NULL_LOG) -> Deformation:
    """Run the construction invariants and reject a deformation that fails any."""
    for check in validate(d):
        debug.emit(f"preset: {d.name} {check.name} {'ok' if check.passed else 'FAILED'} ({check.detail})")
        if not check.passed:
            raise InvalidDeformation(f"deformation '{d.name}' violates {check.name}: {check.detail}")
    return d


def _poly(variables: Sequence[str], records: Any, label: str) -> LaurentPoly:
    if not isinstance(records, list) or not records:
        raise InvalidDeformation(f"'{label}' must be a non-empty list of term records")
    try:
        return LaurentPoly.from_records(variables, records)
    except ValueError as e:
        raise InvalidDeformation(f"'{label}': {e}")


def _ratio(context: Any, variables: Sequence[str], data: Mapping[str, Any], num_key: str, den_key: str) -> Scalar:
    numerator = _poly(variables, data.get(num_key), num_key).to_scalar(context)
    if den_key not in data:
        return numerator
    denominator = _poly(variables, data[den_key], den_key).to_scalar(context)
    if denominator.is_zero:
        raise InvalidDeformation(f"'{den_key}' is the zero polynomial")
    return numerator / denominator


def from_custom(data: Mapping[str, Any], name: str = "custom", debug: DebugLog = NULL_LOG) -> Deformation:
    """Build a deformation from term-record lists (R_num, R_den, phi_num, phi_den, tau1, tau2)."""
    if not isinstance(data, Mapping):
        raise InvalidDeformation("custom deformation must be a mapping")
    for key in ("R_num", "phi_num"):
        if key not in data:
            raise InvalidDeformation(f"custom deformation is missing '{key}'")
    r_value = _ratio(XY, R_VARIABLES, data, "R_num", "R_den")
    phi = _ratio(PQ, PQ_VARIABLES, data, "phi_num", "phi_den")
    tau: Optional[TauPair] = None
    if ("tau1" in data) != ("tau2" in data):
        raise InvalidDeformation("tau1 and tau2 must be given together")
    if "tau1" in data:
        tau = TauPair(
            _poly(PQ_VARIABLES, data["tau1"], "tau1").to_scalar(PQ),
            _poly(PQ_VARIABLES, data["tau2"], "tau2").to_scalar(PQ),
        )
    notes: Tuple[str, ...] = ()
    if data.get("phi_note"):
        notes = (str(data["phi_note"]),)
    return checked(Deformation(name=name, R=r_value, phi=phi, tau=tau, notes=notes), debug)


@lru_cache(maxsize=1)
def _registry() -> Dict[str, Mapping[str, Any]]:
    with open(PRESETS_PATH, "r", encoding="utf-8") as f:
        data = yaml.safe_load(f)
    return {entry["name"]: entry for entry in data.get("presets", [])}


def preset_names() -> List[str]:
    return list(_registry().keys())


def preset_description(name: str) -> str:
    return str(_registry()[name].get("description", ""))


def _closest_name_hint(requested: str, available: Sequence[str]) -> str:
    matches = difflib.get_close_matches(requested, list(available), n=1, cutoff=0.6)
    return f" is '{matches[0]}' what you're looking for?" if matches else ""


@lru_cache(maxsize=None)
def _build_preset(name: str) -> Deformation:
    return from_custom(_registry()[name], name=name)


def preset(name: str, debug: DebugLog = NULL_LOG) -> Deformation:
    registry = _registry()
    if name not in registry:
        known = ", ".join(registry)
        raise UnknownPreset(f"unknown preset '{name}'; known: {known}.{_closest_name_hint(name, list(registry))}")
    d = _build_preset(name)
    debug.emit(f"preset: {name} loaded (tau={'yes' if d.has_tau else 'no'})")
    return d
