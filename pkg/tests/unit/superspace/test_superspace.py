#!/usr/bin/env python3
"""
Unit tests for the super-commutative algebra (rpq_workbench.superspace).
"""
import sys
import unittest
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent))

from colored_runner import run_tests

from rpq_workbench.deformation import bracket_number, preset
from rpq_workbench.exactnum import PQ
from rpq_workbench.superspace import (
    THETA,
    SuperElement,
    check_delta_decomposition,
    check_sigma_derivation,
    check_sigma_endomorphism,
    delta,
    dtheta,
    sigma,
    sigma_derivation_residual,
    super_mul,
)


class TestSuperElement(unittest.TestCase):
    """Test SuperElement arithmetic and grading."""

    def test_theta_squares_to_zero(self):
        """Test that theta * theta = 0"""
        self.assertTrue(super_mul(THETA, THETA).is_zero)

    def test_parity(self):
        """Test parity of homogeneous, mixed and zero elements"""
        even = SuperElement.basis(2)
        odd = SuperElement.basis(-1, odd=True)
        self.assertEqual(even.parity, 0)
        self.assertEqual(odd.parity, 1)
        self.assertIsNone((even + odd).parity)
        self.assertIsNone(SuperElement.zero().parity)

    def test_zero_coefficients_dropped(self):
        """Test that cancelled monomials disappear"""
        a = SuperElement.basis(3) - SuperElement.basis(3)
        self.assertTrue(a.is_zero)
        self.assertEqual(a.render(), "0")

    def test_multiplication_adds_exponents(self):
        """Test that t^m * theta t^n = theta t^(m+n)"""
        product = super_mul(SuperElement.basis(2), SuperElement.basis(-5, odd=True))
        self.assertEqual(product, SuperElement.basis(-3, odd=True))

    def test_render(self):
        """Test the text form of a mixed element"""
        a = SuperElement.of({1: PQ.constant(2)}, {0: PQ.one()})
        self.assertEqual(a.render(), "(2)*t^1 + theta*((1)*t^0)")

    def test_super_mul_associative_and_supercommutative(self):
        """Test (ab)c = a(bc) on mixed elements and ab = (-1)^(|a||b|) ba on homogeneous ones"""
        p, q = PQ.gen("p"), PQ.gen("q")
        homogeneous = [
            SuperElement.basis(2),
            SuperElement.of({-1: p, 3: q ** -1}),
            SuperElement.basis(1, odd=True),
            SuperElement.of(odd={-2: p - q, 0: PQ.constant(3)}),
        ]
        mixed = homogeneous + [SuperElement.of({0: q}, {4: p}), THETA + SuperElement.basis(-3)]
        for a in mixed:
            for b in mixed:
                for c in mixed:
                    self.assertEqual(super_mul(super_mul(a, b), c), super_mul(a, super_mul(b, c)))
        for a in homogeneous:
            for b in homogeneous:
                sign = -1 if a.parity == 1 and b.parity == 1 else 1
                self.assertEqual(super_mul(a, b), super_mul(b, a).scale(sign))


class TestDeformedMaps(unittest.TestCase):
    """Test sigma, d_theta and Delta on basis elements."""

    def setUp(self) -> None:
        """Set up test fixtures."""
        self.js = preset("jagannathan-srinivasa")
        self.ac = preset("arik-coon")

    def test_delta_on_odd_basis(self):
        """Test that Delta(theta t^n) = ([n] + phi^n) theta t^n"""
        image = delta(self.js, SuperElement.basis(2, odd=True))
        expected = SuperElement.of(odd={2: bracket_number(self.js, 2) + self.js.phi ** 2})
        self.assertEqual(image, expected)

    def test_sigma_shifts_odd_weight(self):
        """Test that sigma(theta) = phi theta"""
        self.assertEqual(sigma(self.js, THETA), THETA.scale(self.js.phi))

    def test_dtheta_kills_even(self):
        """Test that d_theta vanishes on B0"""
        self.assertTrue(dtheta(self.js, SuperElement.basis(4)).is_zero)

    def test_delta_decomposition(self):
        """Test that Delta = d_t + theta d_theta on a basis window"""
        for d in (self.js, self.ac):
            for n in range(-3, 4):
                for odd in (False, True):
                    self.assertTrue(check_delta_decomposition(d, SuperElement.basis(n, odd)))

    def test_sigma_is_multiplicative(self):
        """Test that sigma(ab) = sigma(a) sigma(b)"""
        for m in range(-2, 3):
            for n in range(-2, 3):
                a = SuperElement.basis(m)
                b = SuperElement.basis(n, odd=True)
                self.assertTrue(check_sigma_endomorphism(self.js, a, b))

    def test_sigma_derivation_on_even_part(self):
        """Test that Delta is a sigma-derivation on B0 for Arik-Coon numbers"""
        for m in range(-3, 4):
            for n in range(-3, 4):
                residual = sigma_derivation_residual(self.ac, SuperElement.basis(m), SuperElement.basis(n))
                self.assertTrue(residual.is_zero, f"m={m} n={n}: {residual.render()}")

    def test_check_sigma_derivation_mixed_parity(self):
        """Test the sigma-derivation check on products of even and odd basis elements"""
        for m in range(-2, 3):
            for n in range(-2, 3):
                a = SuperElement.basis(m)
                b = SuperElement.basis(n, odd=True)
                self.assertEqual(
                    check_sigma_derivation(self.ac, a, b),
                    sigma_derivation_residual(self.ac, a, b).is_zero,
                )
        self.assertTrue(check_sigma_derivation(self.ac, SuperElement.basis(2), SuperElement.basis(-1)))


if __name__ == '__main__':
    sys.exit(run_tests(sys.modules[__name__], "Superspace"))
