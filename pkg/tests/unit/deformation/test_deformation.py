#!/usr/bin/env python3
"""
Unit tests for deformations and deformed numbers (rpq_workbench.deformation).

These tests pin the preset registry, the construction invariants that
reject bad custom deformations, and the identities between [n], its tau
form and the derived factorials.
"""
import sys
import unittest
from pathlib import Path
from unittest.mock import patch

sys.path.insert(0, str(Path(__file__).parent.parent))

from colored_runner import run_tests

from rpq_workbench import deformation
from rpq_workbench.debuglog import DebugLog
from rpq_workbench.deformation import (
    bracket_number,
    bracket_ratio_2m_over_m,
    classical_limit,
    deformed_binomial,
    deformed_factorial,
    from_custom,
    negative_index_holds,
    preset,
    preset_names,
    tau_form,
    tau_polynomial,
    validate,
)
from rpq_workbench.errors import (
    IndexOutOfRange,
    InvalidDeformation,
    MissingTauFactorization,
    NegativeIndex,
    UnknownPreset,
)
from rpq_workbench.exactnum import PQ


def _records(*terms):
    return [{"coeff": coeff, "exponents": list(exponents)} for coeff, exponents in terms]


JS_RECORDS = {
    "R_num": _records(("1", (1, 0, 0, 0)), ("-1", (0, 1, 0, 0))),
    "R_den": _records(("1", (0, 0, 1, 0)), ("-1", (0, 0, 0, 1))),
    "phi_num": _records(("1", (1, 1))),
    "tau1": _records(("1", (1, 0))),
    "tau2": _records(("1", (0, 1))),
}


class TestPresetRegistry(unittest.TestCase):
    """Test loading presets from presets.yaml."""

    def test_known_presets(self):
        """Test that the bundled presets are all registered"""
        names = preset_names()
        for name in ("jagannathan-srinivasa", "arik-coon", "chakrabarti-jagannathan", "quesne",
                     "biedenharn-macfarlane"):
            self.assertIn(name, names)

    def test_every_preset_validates(self):
        """Test that every bundled preset passes its construction invariants"""
        for name in preset_names():
            for check in validate(preset(name)):
                self.assertTrue(check.passed, f"{name}: {check.name} {check.detail}")

    def test_unknown_preset_hint(self):
        """Test that a misspelt preset name suggests the closest match"""
        with self.assertRaises(UnknownPreset) as context:
            preset("arik-con")
        self.assertIn("arik-coon", str(context.exception))
        self.assertIn("what you're looking for", str(context.exception))

    def test_debug_line_on_load(self):
        """Test that loading a preset emits a 'preset:' debug line"""
        debug = DebugLog(enabled=True)
        with patch.object(debug, "emit") as emit:
            preset("arik-coon", debug)
        emit.assert_called_once()
        self.assertTrue(emit.call_args[0][0].startswith("preset: arik-coon"))

    def test_quesne_has_no_tau(self):
        """Test that a preset without a tau pair refuses tau-only operations"""
        d = preset("quesne")
        self.assertFalse(d.has_tau)
        with self.assertRaises(MissingTauFactorization):
            tau_form(d, 2)


class TestDeformedNumbers(unittest.TestCase):
    """Test [n] and the quantities derived from it."""

    def setUp(self) -> None:
        """Set up test fixtures."""
        self.js = preset("jagannathan-srinivasa")
        self.ac = preset("arik-coon")
        self.p = PQ.gen("p")
        self.q = PQ.gen("q")

    def test_small_values(self):
        """Test that [0] = 0, [1] = 1 and [2] = p + q for (p,q)-numbers"""
        self.assertTrue(bracket_number(self.js, 0).is_zero)
        self.assertEqual(bracket_number(self.js, 1), 1)
        self.assertEqual(bracket_number(self.js, 2), self.p + self.q)

    def test_arik_coon_values(self):
        """Test that Arik-Coon numbers are 1 + q + ... + q^(n-1)"""
        self.assertEqual(bracket_number(self.ac, 3), 1 + self.q + self.q ** 2)

    def test_tau_form_agrees(self):
        """Test that R(p^n, q^n) equals the tau form on a symmetric window"""
        for d in (self.js, self.ac):
            for n in range(-4, 5):
                self.assertEqual(bracket_number(d, n), tau_form(d, n), f"{d.name} n={n}")
                self.assertEqual(tau_polynomial(d, n), tau_form(d, n), f"{d.name} n={n}")

    def test_negative_index(self):
        """Test that [-n] = -(pq)^(-n) [n] holds for (p,q)-numbers"""
        for n in range(1, 5):
            self.assertTrue(negative_index_holds(self.js, n))

    def test_classical_limit(self):
        """Test that [n] tends to n at p = q = 1"""
        self.assertEqual(classical_limit(self.js, 5), 5)
        self.assertEqual(classical_limit(self.ac, 4), 4)
        self.assertEqual(classical_limit(self.js, -3), -3)

    def test_ratio_2m_over_m(self):
        """Test that [2m]/[m] = tau1^m + tau2^m"""
        for m in (1, 2, 3):
            expected = bracket_number(self.js, 2 * m) / bracket_number(self.js, m)
            self.assertEqual(bracket_ratio_2m_over_m(self.js, m), expected)

    def test_factorial_and_binomial(self):
        """Test deformed factorials and binomials at small arguments"""
        self.assertEqual(deformed_factorial(self.js, 0), 1)
        self.assertEqual(deformed_factorial(self.js, 3), (self.p + self.q) * bracket_number(self.js, 3))
        self.assertEqual(deformed_binomial(self.js, 4, 0), 1)
        self.assertEqual(deformed_binomial(self.js, 2, 1), self.p + self.q)

    def test_factorial_errors(self):
        """Test that out-of-range factorial and binomial arguments raise"""
        with self.assertRaises(NegativeIndex):
            deformed_factorial(self.js, -1)
        with self.assertRaises(IndexOutOfRange):
            deformed_binomial(self.js, 2, 3)

    def test_bracket_number_is_memoized(self):
        """Test that repeated [n] lookups hit the cache"""
        bracket_number(self.js, 7)
        before = deformation.bracket_cache_info().hits
        bracket_number(self.js, 7)
        self.assertEqual(deformation.bracket_cache_info().hits, before + 1)


class TestCustomDeformations(unittest.TestCase):
    """Test construction of custom deformations from term records."""

    def test_custom_matches_preset(self):
        """Test that a custom (p,q) deformation reproduces the preset numbers"""
        custom = from_custom(JS_RECORDS)
        js = preset("jagannathan-srinivasa")
        for n in range(-3, 4):
            self.assertEqual(bracket_number(custom, n), bracket_number(js, n))

    def test_missing_key(self):
        """Test that R_num is required"""
        data = dict(JS_RECORDS)
        del data["R_num"]
        with self.assertRaises(InvalidDeformation) as context:
            from_custom(data)
        self.assertIn("R_num", str(context.exception))

    def test_unpaired_tau(self):
        """Test that tau1 without tau2 is rejected"""
        data = dict(JS_RECORDS)
        del data["tau2"]
        with self.assertRaises(InvalidDeformation):
            from_custom(data)

    def test_r_must_vanish_at_one(self):
        """Test that R with a nonzero numerator at x = y = 1 is rejected"""
        data = {"R_num": _records(("1", (1, 0, 0, 0))), "phi_num": _records(("1", (0, 0)))}
        with self.assertRaises(InvalidDeformation) as context:
            from_custom(data)
        self.assertIn("R(1,1)=0", str(context.exception))

    def test_phi_must_be_one_at_one(self):
        """Test that phi(1, 1) != 1 is rejected"""
        data = dict(JS_RECORDS)
        data["phi_num"] = _records(("2", (1, 1)))
        with self.assertRaises(InvalidDeformation) as context:
            from_custom(data)
        self.assertIn("phi(1,1)=1", str(context.exception))

    def test_inconsistent_tau(self):
        """Test that a tau pair that does not reproduce [n] is rejected"""
        data = dict(JS_RECORDS)
        data["tau1"] = _records(("1", (2, 0)))
        with self.assertRaises(InvalidDeformation) as context:
            from_custom(data)
        self.assertIn("tau-consistency", str(context.exception))

    def test_with_phi_records_note(self):
        """Test that overriding phi keeps a note of the change"""
        d = preset("jagannathan-srinivasa").with_phi(PQ.gen("q"))
        self.assertEqual(d.phi, PQ.gen("q"))
        self.assertIn("phi overridden to q", d.notes)


if __name__ == '__main__':
    sys.exit(run_tests(sys.modules[__name__], "Deformations"))
