#!/usr/bin/env python
# -*- coding: utf-8 -*-
# pylint: disable=E1101
#
# tests/unittest_solve.py
#
# Copyright (c) 2017 The hdgstokes developers
#
# This software is released under the MIT License.
#
# http://opensource.org/licenses/mit-license.php
#
"""
Solving the basic and the pressure robust discretizations.
"""

import types
import unittest

import numpy as np

import hdgstokes
import hdgstokes.analysis as an
import hdgstokes.assembly as asm
import hdgstokes.fespace as fs
import hdgstokes.mesh as msh
import hdgstokes.solve as sv


def _gradient_force(points):
    ''' The gradient of x^3 + y^3 - x y. '''
    x, y = points[:, 0], points[:, 1]
    return np.column_stack([3. * x ** 2 - y, 3. * y ** 2 - x])


def _rotational_force(points):
    x, y = points[:, 0], points[:, 1]
    return np.column_stack([np.sin(3. * y) - x * y, x ** 2 + np.cos(2. * x)])


def _max_divergence(solution):
    volume = solution.volume
    worst = 0.
    for element in range(solution.spaces.mesh.n_elements):
        table = solution.spaces.element_tables(element)
        divergence = volume[element].dot(table.divergences)
        worst = max(worst, np.abs(divergence).max())
    return worst


class TestPackage(unittest.TestCase):
    '''
    Testing the flat package namespace.
    '''

    def test_submodules_stay_modules(self):
        '''
        Re-exported functions do not replace the submodules the package
        imports internally.
        '''
        for name in ('polyquad', 'mesh', 'refbasis', 'fespace', 'assembly',
                     'condense', 'solve', 'analysis', 'result'):
            self.assertTrue(isinstance(getattr(hdgstokes, name),
                                       types.ModuleType), name)
        self.assertTrue(sv.cd is hdgstokes.condense)

    def test_solve_through_package(self):
        mesh = hdgstokes.unit_square_mesh(2)
        solution = hdgstokes.solve_basic(mesh, 2, 1., _rotational_force)
        self.assertTrue(np.abs(solution.velocity).max() > 0.)
        system = hdgstokes.assemble_system(solution.spaces, 1.)
        condensed = hdgstokes.condense_system(system)
        self.assertEqual(condensed.counts.gdofs, solution.counts.gdofs)


class TestVariants(unittest.TestCase):
    '''
    Testing the variant checks and solver configurations.
    '''

    def test_check_variant(self):
        sv.check_variant(fs.RELAXED, sv.PR)
        sv.check_variant(fs.FULL, sv.BASIC)
        self.assertRaises(AssertionError, sv.check_variant, fs.FULL, sv.PR)
        self.assertRaises(AssertionError, sv.check_variant, fs.RELAXED, 'exact')
        self.assertRaises(AssertionError, sv.check_variant, 'partial',
                          sv.BASIC)

    def test_reduced_space_mode(self):
        configuration = sv.reduced_space_mode(True)
        self.assertTrue(configuration.reduced)
        self.assertEqual(configuration.mode, fs.RELAXED)
        self.assertFalse(sv.reduced_space_mode(0, configuration).reduced)
        self.assertFalse(sv.DEFAULT_CONFIGURATION.reduced)


class TestSolve(unittest.TestCase):
    '''
    Testing discrete solutions.
    '''

    @classmethod
    def setUpClass(cls):
        cls.mesh = msh.unit_square_mesh(3)

    def test_zero_force(self):
        for solve in (sv.solve_basic, sv.solve_pr):
            solution = solve(self.mesh, 2, 1.)
            self.assertTrue(np.allclose(solution.velocity, 0.))
            self.assertTrue(np.allclose(solution.pressure, 0.))

    def test_zero_mean_pressure(self):
        solution = sv.solve_basic(self.mesh, 2, 1., _gradient_force)
        self.assertAlmostEqual(solution.pressure_mean(), 0., places=12)

    def test_pressure_robust(self):
        '''
        A gradient force is balanced by the pressure alone in the pressure
        robust variant and in full mode, for any viscosity.
        '''
        for nu in (1., 1e-2):
            pr = sv.solve_pr(self.mesh, 2, nu, _gradient_force)
            full = sv.solve_basic(self.mesh, 2, nu, _gradient_force,
                                  mode=fs.FULL)
            for solution in (pr, full):
                largest = np.abs(solution.velocity).max()
                self.assertTrue(largest < 1e-8, "velocity was {0} for nu={1}"
                                .format(largest, nu))

    def test_basic_not_robust(self):
        '''
        The basic variant of the relaxed space picks up a velocity from a
        gradient force.
        '''
        basic = sv.solve_basic(self.mesh, 2, 1., _gradient_force)
        self.assertTrue(np.abs(basic.velocity).max() > 1e-8)

    def test_reconstruction(self):
        solution = sv.solve_basic(self.mesh, 3, 1., _gradient_force)
        reconstructed = sv.reconstruct_solution(solution)
        self.assertTrue(reconstructed.reconstructed)
        again = sv.reconstruct_solution(reconstructed)
        self.assertTrue(np.allclose(again.velocity, reconstructed.velocity))
        self.assertTrue(_max_divergence(solution) < 1e-10)
        self.assertTrue(_max_divergence(reconstructed) < 1e-10)

    def test_reconstruction_normal_continuity(self):
        solution = sv.reconstruct_solution(
            sv.solve_basic(self.mesh, 2, 1., _gradient_force))
        spaces = solution.spaces
        volume = solution.volume
        for facet in self.mesh.interior_facets:
            traces = []
            for side in (0, 1):
                table = spaces.facet_tables(self.mesh.facet_elements[facet, side],
                                            self.mesh.facet_local[facet, side])
                values = np.einsum('b,bpi->pi', volume[table.element],
                                   table.values)
                traces.append(values.dot(table.normal))
            self.assertTrue(np.allclose(traces[0], traces[1], atol=1e-12))

    def test_full_reconstruction(self):
        solution = sv.solve_basic(self.mesh, 1, 1., _gradient_force,
                                  mode=fs.FULL)
        reconstructed = sv.reconstruct_solution(solution)
        self.assertTrue(reconstructed.reconstructed)
        self.assertTrue(np.array_equal(reconstructed.velocity,
                                       solution.velocity))

    def test_reduced(self):
        default = sv.solve_pr(self.mesh, 3, 1., _gradient_force)
        reduced = sv.solve_pr(self.mesh, 3, 1., _gradient_force, reduced=True)
        self.assertTrue(reduced.counts.dofs < default.counts.dofs)
        self.assertEqual(reduced.pressure_local.shape,
                         (self.mesh.n_elements, 1))
        self.assertTrue(_max_divergence(reduced) < 1e-10)

    def test_reduced_same_velocity(self):
        '''
        Dropping the cell functions of nonzero divergence together with the
        higher pressures leaves the discrete velocity unchanged; the dropped
        unknowns are element local, so only dofs shrinks.
        '''
        mesh = msh.unit_square_mesh(4)
        for solve in (sv.solve_basic, sv.solve_pr):
            default = solve(mesh, 2, 1., _rotational_force)
            reduced = solve(mesh, 2, 1., _rotational_force, reduced=True)
            self.assertTrue(an.discrete_norm(default) > 1e-6)
            difference = an.discrete_norm(reduced, default)
            self.assertTrue(difference < 1e-9,
                            "difference was {0}".format(difference))
            self.assertTrue(reduced.counts.dofs < default.counts.dofs)
            self.assertEqual(reduced.counts.gdofs, default.counts.gdofs)
            self.assertEqual(reduced.counts.nze, default.counts.nze)

    def test_counts(self):
        solution = sv.solve_basic(self.mesh, 2, 1.)
        self.assertEqual(solution.counts.gdofs,
                         solution.spaces.dof_map.n_gdofs)


class TestStability(unittest.TestCase):
    '''
    Testing the coercivity and inf-sup constants.
    '''

    @classmethod
    def setUpClass(cls):
        spaces = fs.build_spaces(msh.unit_square_mesh(2), 2)
        cls.system = asm.assemble_system(spaces, 1.)

    def test_coercivity(self):
        self.assertTrue(sv.coercivity_constant(self.system) > 0.)

    def test_inf_sup(self):
        self.assertTrue(sv.inf_sup_constant(self.system) > 0.)

    def test_pressure_mass(self):
        mass = sv.pressure_mass(self.system.spaces)
        self.assertTrue(np.allclose(mass, mass.T))
        self.assertAlmostEqual(
            mass[np.ix_(self.system.spaces.dof_map.pres_dofs[:, 0],
                        self.system.spaces.dof_map.pres_dofs[:, 0])].sum(),
            1.)


class TestStabilityUnderRefinement(unittest.TestCase):
    '''
    Testing the coercivity and inf-sup constants on the meshes n = 1, 2, 4.
    '''

    @classmethod
    def setUpClass(cls):
        cls.coercivity = {}
        cls.inf_sup = {}
        for k in (1, 2, 3):
            coercivity = []
            inf_sup = []
            for n in (1, 2, 4):
                spaces = fs.build_spaces(msh.unit_square_mesh(n), k)
                system = asm.assemble_system(spaces, 1.)
                coercivity.append(sv.coercivity_constant(system))
                inf_sup.append(sv.inf_sup_constant(system))
            cls.coercivity[k] = np.array(coercivity)
            cls.inf_sup[k] = np.array(inf_sup)

    def test_coercivity(self):
        for k, values in self.coercivity.items():
            self.assertTrue(np.all(values > 0.), "k={0}: {1}".format(k, values))
            self.assertTrue(values[-1] > 0.5 * values[0],
                            "k={0}: {1}".format(k, values))
        decrease = 1. - self.coercivity[2][1:] / self.coercivity[2][:-1]
        self.assertTrue(np.all(decrease < 0.1), "decrease was {0}".format(
            decrease))

    def test_inf_sup(self):
        for k in (2, 3):
            values = self.inf_sup[k]
            decrease = 1. - values[1:] / values[:-1]
            self.assertTrue(np.all(decrease < 0.1),
                            "k={0}: {1}".format(k, values))

    def test_inf_sup_lowest_order(self):
        '''
        With piecewise constant pressures the constant still settles from
        above on these coarse meshes: it stays bounded away from zero and
        the relative decrease shrinks with every refinement.
        '''
        values = self.inf_sup[1]
        decrease = 1. - values[1:] / values[:-1]
        self.assertTrue(np.all(values > 0.5), "values were {0}".format(values))
        self.assertTrue(np.all(decrease > 0.))
        self.assertTrue(decrease[1] < decrease[0],
                        "decrease was {0}".format(decrease))


if __name__ == '__main__':
    unittest.main()
