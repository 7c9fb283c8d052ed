#
# hdgstokes/solve.py
#
# Copyright (c) 2017 The hdgstokes developers
#
# This software is released under the MIT License.
#
# http://opensource.org/licenses/mit-license.php
#
"""
Wrappers that discretize and solve the Stokes problem with the basic or the
pressure robust right-hand side, the reconstruction of solutions and the
discrete stability constants.
"""

import collections
import logging

import numpy as np
import scipy.linalg

from . import assembly as asm
from . import condense as cd
from . import fespace as fs


_LOGGER = logging.getLogger(__name__)

BASIC = 'basic'
PR = 'pr'
VARIANTS = (BASIC, PR)


SolverConfiguration = collections.namedtuple(
    'SolverConfiguration',
    ['mode', 'reduced', 'projected_jumps', 'lam'])

DEFAULT_CONFIGURATION = SolverConfiguration(fs.RELAXED, False, True,
                                            asm.DEFAULT_LAMBDA)


def reduced_space_mode(flag, configuration=DEFAULT_CONFIGURATION):
    '''
    A solver configuration with the reduced velocity/pressure pair switched
    on or off: without the cell functions of nonzero divergence and with
    piecewise constant pressures.
    '''
    return configuration._replace(reduced=bool(flag))


def check_variant(mode, variant):
    '''
    checks that the right-hand side variant can be used with the mode:
        - variant must be 'basic' or 'pr'
        - the pressure robust variant needs relaxed H(div)-conformity
    '''
    assert mode in fs.MODES, \
        "Please choose mode equal to either 'full' or 'relaxed'."
    assert variant in VARIANTS, \
        "Please choose variant equal to either 'basic' or 'pr'."
    assert variant == BASIC or mode == fs.RELAXED, \
        "The 'pr' variant needs mode 'relaxed', got mode '{0}'.".format(mode)


class Solution(collections.namedtuple(
        'Solution', ['spaces', 'velocity', 'pressure', 'multiplier',
                     'variant', 'reconstructed', 'counts'])):
    '''
    A discrete solution. velocity and pressure are coefficient vectors over
    the free dofs of spaces.
    '''
    __slots__ = ()

    @property
    def mode(self):
        return self.spaces.mode

    @property
    def volume(self):
        ''' Shape function coefficients per element, (ne, nb). '''
        return self.spaces.local_coefficients(self.velocity)

    @property
    def facet(self):
        ''' Tangential facet coefficients per element and local facet. '''
        return self.spaces.facet_coefficients(self.velocity)

    @property
    def pressure_local(self):
        ''' Pressure coefficients per element. '''
        return self.spaces.pressure_coefficients(self.pressure)

    def pressure_mean(self):
        return float(asm.mean_constraint(self.spaces).dot(self.pressure))


Discretization = collections.namedtuple(
    'Discretization', ['spaces', 'system', 'condensed', 'reconstruction'])


def discretize(mesh, k, nu, force=None,
               configuration=DEFAULT_CONFIGURATION):
    '''
    Builds the spaces, assembles and condenses the system.

    Returns:
      a Discretization; its reconstruction is None in full mode.
    '''
    spaces = fs.build_spaces(mesh, k, configuration.mode,
                             configuration.reduced,
                             configuration.projected_jumps)
    system = asm.assemble_system(spaces, nu, force, configuration.lam)
    condensed = cd.condense(system)
    reconstruction = asm.build_reconstruction(spaces) \
        if configuration.mode == fs.RELAXED else None
    return Discretization(spaces, system, condensed, reconstruction)


def solve_discretization(discretization, variant=BASIC):
    '''
    Solves an assembled discretization with the chosen right-hand side.

    Raises:
      SolverBreakdownError: if the global solve fails.
    '''
    check_variant(discretization.spaces.mode, variant)
    system = discretization.system
    rhs = system.rhs
    if variant == PR:
        rhs = asm.assemble_rhs_pr(rhs, discretization.reconstruction)
    solution = cd.solve_condensed(discretization.condensed, rhs)
    velocity, pressure, multiplier = cd.split_solution(system, solution)
    _LOGGER.debug("solved %s variant, multiplier %.3e", variant, multiplier)
    return Solution(discretization.spaces, velocity, pressure, multiplier,
                    variant, False, discretization.condensed.counts)


def solve_basic(mesh, k, nu, force=None, lam=asm.DEFAULT_LAMBDA,
                mode=fs.RELAXED, reduced=False, projected_jumps=True):
    '''
    Solves the basic discretization, the load tested with the velocity
    shape functions themselves.

    Args:
      mesh: a Mesh.
      k: polynomial order.
      nu: viscosity.
      force: callable returning the force at points (np, 2), None for zero.
      lam: stabilization parameter.
      mode: FULL or RELAXED.
      reduced: use the reduced velocity/pressure pair.
      projected_jumps: project tangential jumps onto P^{k-1}.

    Returns:
      a Solution.
    '''
    configuration = SolverConfiguration(mode, reduced, projected_jumps, lam)
    return solve_discretization(
        discretize(mesh, k, nu, force, configuration), BASIC)


def solve_pr(mesh, k, nu, force=None, lam=asm.DEFAULT_LAMBDA, reduced=False,
             projected_jumps=True):
    '''
    Solves the pressure robust discretization: same operator as the basic
    one, load tested with reconstructed shape functions. Relaxed mode only.

    Returns:
      a Solution.
    '''
    configuration = SolverConfiguration(fs.RELAXED, reduced, projected_jumps,
                                        lam)
    return solve_discretization(
        discretize(mesh, k, nu, force, configuration), PR)


def reconstruct_solution(solution, reconstruction=None):
    '''
    Applies the averaging reconstruction to the velocity of a solution; the
    result is normal continuous and pointwise divergence free if the input
    velocity is elementwise divergence free.

    A fully conforming solution is returned unchanged (flagged as
    reconstructed).
    '''
    if solution.spaces.mode == fs.FULL:
        return solution._replace(reconstructed=True)
    if reconstruction is None:
        reconstruction = asm.build_reconstruction(solution.spaces)
    return solution._replace(velocity=reconstruction.apply(solution.velocity),
                             reconstructed=True)


def coercivity_constant(system):
    '''
    Smallest generalized eigenvalue of A / nu against the discrete norm
    matrix, a lower bound of the coercivity constant.
    '''
    stiffness = system.A.toarray() / system.nu
    norm = asm.assemble_norm(system.spaces, system.local).toarray()
    value = scipy.linalg.eigh(stiffness, norm, eigvals_only=True,
                              subset_by_index=[0, 0])[0]
    _LOGGER.info("coercivity constant: %.6e", value)
    return float(value)


def pressure_mass(spaces):
    ''' The (block diagonal) pressure mass matrix as a dense array. '''
    mass = np.zeros((spaces.dof_map.n_pressure, spaces.dof_map.n_pressure))
    for element in range(spaces.mesh.n_elements):
        table = spaces.element_tables(element)
        local = np.einsum('ap,bp,p->ab', table.pressure, table.pressure,
                          table.weights)
        dofs = spaces.dof_map.pres_dofs[element]
        mass[np.ix_(dofs, dofs)] += local
    return mass


def inf_sup_constant(system, tol=1e-10):
    '''
    The discrete inf-sup constant of B against the discrete velocity norm
    and the L2 pressure norm: the square root of the smallest nonzero
    generalized eigenvalue of B N^{-1} B^T against the pressure mass matrix.
    '''
    norm = asm.assemble_norm(system.spaces, system.local).toarray()
    divergence = system.B.toarray()
    factor = scipy.linalg.cho_factor(norm)
    schur = divergence.dot(scipy.linalg.cho_solve(factor, divergence.T))
    schur = 0.5 * (schur + schur.T)
    values = scipy.linalg.eigh(schur, pressure_mass(system.spaces),
                               eigvals_only=True)
    nonzero = values[values > tol * values.max()]
    value = float(np.sqrt(nonzero.min()))
    _LOGGER.info("inf-sup constant: %.6e (%d zero modes)", value,
                 len(values) - len(nonzero))
    return value
