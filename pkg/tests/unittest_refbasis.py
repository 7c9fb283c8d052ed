#!/usr/bin/env python
# -*- coding: utf-8 -*-
# pylint: disable=E1101
#
# tests/unittest_refbasis.py
#
# Copyright (c) 2017 The hdgstokes developers
#
# This software is released under the MIT License.
#
# http://opensource.org/licenses/mit-license.php
#
"""
The hierarchical H(div) bases on the reference simplices.
"""

import unittest

import numpy as np

import hdgstokes.polyquad as pq
import hdgstokes.refbasis as rb


def _span_rank(basis, degree_offset=4):
    rule = pq.simplex_quadrature(basis.dim, 2 * basis.k + degree_offset)
    values = basis.tabulate(rule.points)[0]
    return np.linalg.matrix_rank(values.reshape(len(basis), -1))


class TestCounts(unittest.TestCase):
    '''
    Testing the number and classification of the basis functions.
    '''

    def test_count_2d(self):
        for k in range(1, 6):
            basis = rb.build_reference_basis(2, k)
            self.assertEqual(len(basis), (k + 1) * (k + 2))
        self.assertEqual(len(rb.build_reference_basis(2, 2)), 12)

    def test_count_3d(self):
        for k in (1, 2, 3):
            basis = rb.build_reference_basis(3, k)
            self.assertEqual(len(basis), (k + 1) * (k + 2) * (k + 3) // 2)

    def test_facet_blocks(self):
        '''
        Each facet carries one function per normal trace mode, RT0 first and
        a highest-order function last.
        '''
        for dim, sizes in ((2, lambda k: k + 1),
                           (3, lambda k: (k + 1) * (k + 2) // 2)):
            for k in (1, 2, 3):
                basis = rb.build_reference_basis(dim, k)
                for block in basis.facet_blocks:
                    self.assertEqual(len(block), sizes(k))
                    self.assertEqual(block[0][1], 0)
                    self.assertEqual(block[-1][1], k)
                    self.assertEqual(basis.functions[block[0][0]].kind, rb.RT0)

    def test_cell_div_count(self):
        '''
        The divergence carrying cell functions match the mean-zero part of
        P^{k-1}.
        '''
        for k in (1, 2, 3, 4):
            basis = rb.build_reference_basis(2, k)
            self.assertEqual(len(basis.indices(rb.CELL_DIV)),
                             k * (k + 1) // 2 - 1)
        for k in (1, 2, 3):
            basis = rb.build_reference_basis(3, k)
            self.assertEqual(len(basis.indices(rb.CELL_DIV)),
                             k * (k + 1) * (k + 2) // 6 - 1)

    def test_cached(self):
        self.assertTrue(rb.build_reference_basis(2, 3)
                        is rb.build_reference_basis(2, 3))

    def test_invalid_order(self):
        self.assertRaises(ValueError, rb.build_reference_basis, 2, 0)
        self.assertRaises(AssertionError, rb.build_reference_basis, 4, 1)


class TestSpan(unittest.TestCase):
    '''
    Testing that the bases span the full polynomial spaces.
    '''

    def test_span_2d(self):
        for k in (1, 2, 3, 4):
            basis = rb.build_reference_basis(2, k)
            self.assertEqual(_span_rank(basis), len(basis))

    def test_span_3d(self):
        for k in (1, 2):
            basis = rb.build_reference_basis(3, k)
            self.assertEqual(_span_rank(basis), len(basis))

    def test_divergence_onto(self):
        '''
        The divergences span P^{k-1}.
        '''
        for dim in (2, 3):
            for k in (1, 2, 3):
                basis = rb.build_reference_basis(dim, k)
                rule = pq.simplex_quadrature(dim, 2 * k + 2)
                divergences = basis.tabulate(rule.points)[2]
                expected = len(pq.monomial_exponents(dim, k - 1))
                self.assertEqual(np.linalg.matrix_rank(divergences), expected)


class TestStructure(unittest.TestCase):
    '''
    Testing the orthogonality and support properties of the bases.
    '''

    def test_normal_orthogonality_2d(self):
        for k in range(1, 5):
            basis = rb.build_reference_basis(2, k)
            for facet in range(3):
                value = rb.check_normal_orthogonality(basis, facet)
                self.assertTrue(value < 1e-12,
                                "k={0} facet={1}: {2}".format(k, facet, value))

    def test_normal_orthogonality_3d(self):
        for k in (1, 2):
            basis = rb.build_reference_basis(3, k)
            for facet in range(4):
                value = rb.check_normal_orthogonality(basis, facet)
                self.assertTrue(value < 1e-10,
                                "k={0} facet={1}: {2}".format(k, facet, value))

    def test_trace_support(self):
        '''
        Only the functions of a facet have a normal trace on it.
        '''
        for dim, orders in ((2, (1, 2, 3)), (3, (1, 2))):
            for k in orders:
                basis = rb.build_reference_basis(dim, k)
                for facet in range(dim + 1):
                    value = rb.check_trace_support(basis, facet)
                    self.assertTrue(value < 1e-12, "dim={0} k={1}: {2}".format(
                        dim, k, value))

    def test_highest_order_volume_orthogonality(self):
        for k in (2, 3, 4):
            basis = rb.build_reference_basis(2, k)
            value = rb.check_highest_order_volume_orthogonality(basis)
            self.assertTrue(value < 1e-12, "k={0}: {1}".format(k, value))
        value = rb.check_highest_order_volume_orthogonality(
            rb.build_reference_basis(3, 2))
        self.assertTrue(value < 1e-12, "3D: {0}".format(value))
        self.assertEqual(rb.check_highest_order_volume_orthogonality(
            rb.build_reference_basis(2, 1)), 0.)

    def test_curls_are_divergence_free(self):
        for dim, k in ((2, 3), (3, 2)):
            basis = rb.build_reference_basis(dim, k)
            rule = pq.simplex_quadrature(dim, 4)
            divergences = basis.tabulate(rule.points)[2]
            for kind in (rb.FACET_HIGH, rb.CELL_DIV_FREE):
                selected = divergences[basis.indices(kind)]
                self.assertTrue(np.allclose(selected, 0., atol=1e-12),
                                "{0} divergence was {1}".format(
                                    kind, np.abs(selected).max()))

    def test_gradient_consistency(self):
        '''
        The tabulated divergence is the trace of the tabulated gradient and
        the gradient matches a finite difference.
        '''
        basis = rb.build_reference_basis(2, 3)
        point = np.array([[0.1, 0.3]])
        step = 1e-6
        values, gradients, divergences = basis.tabulate(point)
        self.assertTrue(np.allclose(divergences[:, 0],
                                    np.trace(gradients[:, 0], axis1=1,
                                             axis2=2)))
        for d in range(2):
            shifted = point.copy()
            shifted[0, d] += step
            difference = (basis.tabulate(shifted)[0] - values) / step
            self.assertTrue(np.allclose(difference[:, 0], gradients[:, 0, :, d],
                                        atol=1e-4))


class TestEvaluation(unittest.TestCase):
    '''
    Testing point evaluation.
    '''

    def setUp(self):
        self.basis = rb.build_reference_basis(2, 2)

    def test_eval_inside(self):
        result = rb.eval_basis(self.basis, [0., 0.5])
        self.assertEqual(len(result), len(self.basis))
        vector, divergence = result[0]
        self.assertEqual(vector.shape, (2,))
        self.assertTrue(np.isfinite(divergence))

    def test_eval_vertex(self):
        rb.eval_basis(self.basis, [1., 0.])

    def test_eval_outside(self):
        self.assertRaises(rb.OutsideElementError, rb.eval_basis, self.basis,
                          [0.9, 0.5])
        self.assertRaises(rb.OutsideElementError, rb.eval_basis, self.basis,
                          [0., -0.1])

    def test_rt0_flux(self):
        '''
        The RT0 function of a facet has unit flux through it.
        '''
        for facet in range(3):
            points, weights, normal = rb.facet_rule(2, facet, 2)
            values = self.basis.tabulate(points)[0][facet]
            flux = weights.dot(values.dot(normal))
            self.assertAlmostEqual(abs(flux), 1., places=12)


if __name__ == '__main__':
    unittest.main()
