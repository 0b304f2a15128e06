#!/usr/bin/env python3
"""
Unit tests for graded operators (rpq_workbench.operators).

Operators are words over t^k, theta, Delta, sigma, d_t and d_theta; these
tests check their action on the basis window and the parity rules.
"""
import sys
import unittest
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent))

from colored_runner import run_tests

from rpq_workbench.deformation import bracket_number, preset
from rpq_workbench.errors import ContextMismatch, MixedParity
from rpq_workbench.operators import (
    ExtendedOperator,
    MulT,
    MulTheta,
    action_table,
    apply_to_basis,
    compose,
    compose_all,
    first_difference,
    g_op,
    l_op,
    lin_comb,
    op_equal_on_window,
    operator,
    scale,
    window_indices,
    zero_operator,
)
from rpq_workbench.superspace import SuperElement


class TestGeneratorAction(unittest.TestCase):
    """Test l_m and G_m on basis elements."""

    def setUp(self) -> None:
        """Set up test fixtures."""
        self.d = preset("jagannathan-srinivasa")

    def test_l_on_even_basis(self):
        """Test that l_m(t^n) = -[n] t^(n+m)"""
        image = apply_to_basis(l_op(self.d, 1), 2)
        self.assertEqual(image, SuperElement.of({3: -bracket_number(self.d, 2)}))

    def test_l_annihilates_constants(self):
        """Test that l_m(1) = 0 since [0] = 0"""
        self.assertTrue(apply_to_basis(l_op(self.d, 3), 0).is_zero)

    def test_l_on_odd_basis(self):
        """Test that l_m(theta t^n) picks up [n] + phi^n"""
        image = apply_to_basis(l_op(self.d, -1), 2, odd=True)
        coeff = -(bracket_number(self.d, 2) + self.d.phi ** 2)
        self.assertEqual(image, SuperElement.of(odd={1: coeff}))

    def test_g_on_even_basis(self):
        """Test that G_m(t^n) = -[n] theta t^(n+m)"""
        image = apply_to_basis(g_op(self.d, 2), 1)
        self.assertEqual(image, SuperElement.of(odd={3: -bracket_number(self.d, 1)}))

    def test_g_annihilates_odd_part(self):
        """Test that G_m vanishes on theta B0"""
        self.assertTrue(apply_to_basis(g_op(self.d, 2), 1, odd=True).is_zero)

    def test_parities(self):
        """Test that l is even and G is odd"""
        self.assertEqual(l_op(self.d, 0).parity, 0)
        self.assertEqual(g_op(self.d, 0).parity, 1)


class TestOperatorAlgebra(unittest.TestCase):
    """Test composition, linear combinations and comparison."""

    def setUp(self) -> None:
        """Set up test fixtures."""
        self.d = preset("jagannathan-srinivasa")

    def test_odd_composition_vanishes(self):
        """Test that G_a G_b acts as zero because theta^2 = 0"""
        product = compose(g_op(self.d, 1), g_op(self.d, -2))
        self.assertEqual(product.parity, 0)
        self.assertTrue(op_equal_on_window(product, zero_operator(self.d, 0), 4))

    def test_compose_all_is_left_nested(self):
        """Test that compose_all chains compose in order"""
        ops = [l_op(self.d, 1), g_op(self.d, 0), l_op(self.d, -1)]
        chained = compose_all(ops)
        self.assertEqual(chained.parity, 1)
        self.assertTrue(op_equal_on_window(chained, compose(compose(ops[0], ops[1]), ops[2]), 3))

    def test_compose_associative(self):
        """Test (AB)C = A(BC) on mixed-parity triples of l_m, G_n and multiplication by theta t^k"""
        theta_t = operator(self.d, (MulTheta(), MulT(2)))
        ops = [l_op(self.d, 1), g_op(self.d, -2), theta_t, l_op(self.d, -1), g_op(self.d, 0)]
        for a in ops:
            for b in ops:
                for c in ops:
                    left = compose(compose(a, b), c)
                    right = compose(a, compose(b, c))
                    self.assertEqual(left.parity, right.parity)
                    self.assertTrue(op_equal_on_window(left, right, 3))

    def test_mixed_parity_sum_rejected(self):
        """Test that even and odd operators cannot be added"""
        with self.assertRaises(MixedParity):
            lin_comb([(1, l_op(self.d, 1)), (1, g_op(self.d, 1))])

    def test_cross_deformation_rejected(self):
        """Test that operators over different deformations cannot be combined"""
        other = preset("arik-coon")
        with self.assertRaises(ContextMismatch):
            compose(l_op(self.d, 1), l_op(other, 1))

    def test_cancellation(self):
        """Test that l - l merges to the structurally zero operator"""
        op = lin_comb([(1, l_op(self.d, 2)), (-1, l_op(self.d, 2))])
        self.assertTrue(op.is_structurally_zero)

    def test_lin_comb_needs_terms(self):
        """Test that an empty linear combination is an error"""
        with self.assertRaises(ValueError):
            lin_comb([])

    def test_window_order(self):
        """Test that the basis window is scanned from 0 outward"""
        self.assertEqual(window_indices(2), [0, 1, -1, 2, -2])

    def test_first_difference(self):
        """Test that the first disagreement is reported at t^1"""
        difference = first_difference(l_op(self.d, 1), l_op(self.d, 2), 3)
        self.assertIsNotNone(difference)
        n, odd, left, right = difference
        self.assertEqual((n, odd), (1, False))
        self.assertEqual(left, SuperElement.of({2: -bracket_number(self.d, 1)}))

    def test_action_table(self):
        """Test that the action table lists even then odd basis elements"""
        rows = action_table(l_op(self.d, 1), 1)
        self.assertEqual([label for label, _ in rows],
                         ["t^-1", "t^0", "t^1", "theta*t^-1", "theta*t^0", "theta*t^1"])
        self.assertEqual(dict(rows)["t^0"], "0")

    def test_extended_negation(self):
        """Test that negating an extended operator negates both parts"""
        ext = ExtendedOperator(l_op(self.d, 1), self.d.phi)
        negated = ext.negated()
        self.assertEqual(negated.central, -self.d.phi)
        self.assertTrue(op_equal_on_window(negated.op, scale(-1, l_op(self.d, 1)), 3))
        self.assertFalse(ext.equal_on_window(negated, 3))


if __name__ == '__main__':
    sys.exit(run_tests(sys.modules[__name__], "Graded Operators"))
