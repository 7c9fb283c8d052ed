#!/usr/bin/env python
# -*- coding: utf-8 -*-
# pylint: disable=E1101
#
# tests/unittest_condense.py
#
# Copyright (c) 2017 The hdgstokes developers
#
# This software is released under the MIT License.
#
# http://opensource.org/licenses/mit-license.php
#
"""
Static condensation against the monolithic saddle point solve.
"""

import unittest

import numpy as np

import hdgstokes.assembly as asm
import hdgstokes.condense as cd
import hdgstokes.fespace as fs
import hdgstokes.mesh as msh


def _force(points):
    x, y = points[:, 0], points[:, 1]
    return np.column_stack([np.sin(3. * y) + x * y, np.cos(2. * x) - y ** 2])


class TestCondensation(unittest.TestCase):
    '''
    Testing that condensed and monolithic solves agree.
    '''

    @classmethod
    def setUpClass(cls):
        cls.mesh = msh.unit_square_mesh(3)

    def _compare(self, k, mode, reduced=False, nu=1.):
        spaces = fs.build_spaces(self.mesh, k, mode, reduced)
        system = asm.assemble_system(spaces, nu, _force)
        condensed = cd.condense(system)
        a = cd.solve_condensed(condensed)
        b = cd.solve_monolithic(system)
        difference = np.abs(a - b).max() / np.abs(b).max()
        self.assertTrue(difference < 1e-9,
                        "k={0} mode={1} reduced={2}: {3}".format(
                            k, mode, reduced, difference))
        return system, condensed, a

    def test_relaxed(self):
        for k in (1, 2, 3):
            self._compare(k, fs.RELAXED)

    def test_full(self):
        for k in (1, 2):
            self._compare(k, fs.FULL)

    def test_reduced(self):
        self._compare(3, fs.RELAXED, reduced=True)

    def test_small_viscosity(self):
        self._compare(2, fs.RELAXED, nu=1e-4)

    def test_multiplier(self):
        '''
        The mean value multiplier of a consistent system vanishes and the
        pressure has zero mean.
        '''
        system, _, solution = self._compare(2, fs.RELAXED)
        _, pressure, multiplier = cd.split_solution(system, solution)
        self.assertTrue(abs(multiplier) < 1e-10, "mu was {0}".format(multiplier))
        self.assertAlmostEqual(system.mean_constraint.dot(pressure), 0.,
                               places=12)

    def test_other_rhs(self):
        '''
        A condensed system is reused for a second load vector.
        '''
        spaces = fs.build_spaces(self.mesh, 2)
        system = asm.assemble_system(spaces, 1., _force)
        condensed = cd.condense(system)
        rhs = asm.assemble_rhs_pr(system.rhs, asm.build_reconstruction(spaces))
        a = cd.solve_condensed(condensed, rhs)
        b = cd.solve_monolithic(system, rhs)
        self.assertTrue(np.allclose(a, b, atol=1e-10 * np.abs(b).max()))


class TestCounts(unittest.TestCase):
    '''
    Testing the sizes of the condensed system.
    '''

    def test_gdofs(self):
        mesh = msh.unit_square_mesh(3)
        for mode in fs.MODES:
            spaces = fs.build_spaces(mesh, 2, mode)
            condensed = cd.condense(asm.assemble_system(spaces, 1.))
            self.assertEqual(condensed.gdofs, spaces.dof_map.n_gdofs)
            self.assertEqual(condensed.gdofs,
                             spaces.dof_map.n_interface_velocity
                             + mesh.n_elements + 1)
            counts = condensed.counts
            self.assertEqual(counts.nze, condensed.schur.nnz)
            self.assertEqual(counts.dofs, spaces.dof_map.n_dofs)

    def test_schur_symmetric(self):
        spaces = fs.build_spaces(msh.unit_square_mesh(2), 2)
        condensed = cd.condense(asm.assemble_system(spaces, 1.))
        schur = condensed.schur
        self.assertTrue(abs(schur - schur.T).max() < 1e-10)

    def test_element_matrix(self):
        spaces = fs.build_spaces(msh.unit_square_mesh(1), 2)
        system = asm.assemble_system(spaces, 2.)
        matrix = cd.element_matrix(system, 0)
        size = spaces.n_local_velocity + spaces.dof_map.pres_dofs.shape[1]
        self.assertEqual(matrix.shape, (size, size))
        self.assertTrue(np.allclose(matrix, matrix.T))


if __name__ == '__main__':
    unittest.main()
