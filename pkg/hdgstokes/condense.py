#
# hdgstokes/condense.py
#
# Copyright (c) 2017 The hdgstokes developers
#
# This software is released under the MIT License.
#
# http://opensource.org/licenses/mit-license.php
#
"""
Static condensation of the saddle point system and the direct solution of
the condensed (and, for verification, the unreduced) system.

The unknowns of the saddle point system are ordered [velocity | pressure |
mean value multiplier]. The interface unknowns kept after condensation are
the interface velocity dofs, the element pressure constants and the
multiplier; all other unknowns belong to a single element and are
eliminated elementwise.
"""

import collections
import logging
import warnings

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse import linalg as spla

from . import fespace as fs


_LOGGER = logging.getLogger(__name__)

_PIVOT_TOL = 1e-16


class CondensationError(Exception):
    '''
    Raised when an element local block cannot be factorized.
    '''
    pass


class SolverBreakdownError(Exception):
    '''
    Raised when the global factorization fails or produces a non finite
    solution.
    '''
    pass


ElementCondensation = collections.namedtuple(
    'ElementCondensation',
    ['element', 'interface', 'local', 'interface_slots', 'local_slots',
     'factor', 'coupling'])
"""Local elimination data: system indices of the interface and local
unknowns, their positions in the element vector, the LU factors of the local
block and the interface-by-local coupling block."""


CostCounts = collections.namedtuple('CostCounts', ['dofs', 'gdofs', 'nze'])


class CondensedSystem(object):
    '''
    The Schur complement over the interface unknowns and the element
    factorizations needed to recover the local unknowns.

    Attributes:
      system: the StokesSystem that was condensed.
      schur: CSC matrix over the interface unknowns.
      interface_index: for every system unknown its interface position or -1.
      elements: list of ElementCondensation.
    '''

    def __init__(self, system, schur, interface_index, elements):
        self.system = system
        self.schur = schur
        self.interface_index = interface_index
        self.elements = elements
        self._factor = None

    @property
    def gdofs(self):
        return self.schur.shape[0]

    @property
    def nze(self):
        return self.schur.nnz

    @property
    def n_unknowns(self):
        return len(self.interface_index)

    @property
    def counts(self):
        return CostCounts(self.system.spaces.dof_map.n_dofs, self.gdofs,
                          self.nze)

    def factorize(self):
        ''' LU factorization of the Schur complement, computed once. '''
        if self._factor is None:
            try:
                self._factor = spla.splu(self.schur.tocsc())
            except RuntimeError as err:
                raise SolverBreakdownError(
                    "Factorization of the condensed system failed: "
                    "{0}".format(err))
            _LOGGER.info("factorized condensed system: %d unknowns, %d "
                         "stored entries", self.gdofs, self.nze)
        return self._factor


def _system_indices(spaces, element):
    ''' System indices of the velocity then pressure slots of an element. '''
    n_velocity = spaces.dof_map.n_velocity
    velocity = spaces.local_velocity_dofs(element)
    pressure = spaces.dof_map.pres_dofs[element]
    return np.concatenate([velocity,
                           np.where(pressure != fs.UNUSED,
                                    pressure + n_velocity, fs.UNUSED)])


def element_matrix(system, element):
    ''' The element saddle point matrix [[nu A_T, B_T^T], [B_T, 0]]. '''
    local = system.local[element]
    nv = local.viscosity.shape[0]
    npl = local.divergence.shape[0]
    matrix = np.zeros((nv + npl, nv + npl))
    matrix[:nv, :nv] = system.nu * local.viscosity
    matrix[:nv, nv:] = local.divergence.T
    matrix[nv:, :nv] = local.divergence
    return matrix


def _interface_index(system):
    dof_map = system.spaces.dof_map
    n_velocity = dof_map.n_velocity
    n_unknowns = n_velocity + dof_map.n_pressure + 1
    index = np.full(n_unknowns, -1, dtype=int)
    n_iv = dof_map.n_interface_velocity
    index[:n_iv] = np.arange(n_iv)
    constants = dof_map.pres_dofs[:, 0] + n_velocity
    index[constants] = n_iv + np.arange(len(constants))
    index[-1] = n_iv + len(constants)
    return index


def _factor_local(block, element):
    try:
        with warnings.catch_warnings():
            warnings.simplefilter('error', scipy.linalg.LinAlgWarning)
            factor = scipy.linalg.lu_factor(block)
    except (scipy.linalg.LinAlgError, scipy.linalg.LinAlgWarning,
            ValueError) as err:
        raise CondensationError("Singular local block on element {0}: "
                                "{1}".format(element, err))
    pivots = np.abs(np.diag(factor[0]))
    if pivots.min() <= _PIVOT_TOL * max(pivots.max(), 1.):
        raise CondensationError("Singular local block on element {0}: "
                                "smallest pivot {1}".format(element,
                                                            pivots.min()))
    return factor


def condense(system):
    '''
    Eliminates the element local unknowns (cell functions, split facet
    functions, higher pressure modes) elementwise.

    Args:
      system: a StokesSystem.

    Returns:
      a CondensedSystem.

    Raises:
      CondensationError: if a local block is singular.
    '''
    spaces = system.spaces
    index = _interface_index(system)
    n_interface = int(index.max()) + 1
    rows = []
    cols = []
    data = []
    elements = []
    for element in range(spaces.mesh.n_elements):
        indices = _system_indices(spaces, element)
        matrix = element_matrix(system, element)
        used = indices != fs.UNUSED
        slots = np.flatnonzero(used)
        is_interface = index[indices[slots]] >= 0
        islots = slots[is_interface]
        lslots = slots[~is_interface]
        k_ii = matrix[np.ix_(islots, islots)]
        coupling = matrix[np.ix_(islots, lslots)]
        factor = None
        if len(lslots):
            factor = _factor_local(matrix[np.ix_(lslots, lslots)], element)
            k_ii = k_ii - coupling.dot(
                scipy.linalg.lu_solve(factor, coupling.T))
        positions = index[indices[islots]]
        rr, cc = np.meshgrid(positions, positions, indexing='ij')
        rows.append(rr.ravel())
        cols.append(cc.ravel())
        data.append(k_ii.ravel())
        elements.append(ElementCondensation(element, indices[islots],
                                            indices[lslots], islots, lslots,
                                            factor, coupling))
    multiplier = n_interface - 1
    constants = index[spaces.dof_map.pres_dofs[:, 0]
                      + spaces.dof_map.n_velocity]
    mean = system.mean_constraint[spaces.dof_map.pres_dofs[:, 0]]
    rows.extend([constants, np.full(len(constants), multiplier)])
    cols.extend([np.full(len(constants), multiplier), constants])
    data.extend([mean, mean])
    schur = sp.coo_matrix((np.concatenate(data),
                           (np.concatenate(rows), np.concatenate(cols))),
                          shape=(n_interface, n_interface)).tocsc()
    _LOGGER.debug("condensed %d unknowns to %d", len(index), n_interface)
    return CondensedSystem(system, schur, index, elements)


def full_rhs(system, rhs=None):
    ''' The right-hand side over all unknowns of the saddle point system. '''
    rhs = system.rhs if rhs is None else np.asarray(rhs, dtype=float)
    dof_map = system.spaces.dof_map
    return np.concatenate([rhs, np.zeros(dof_map.n_pressure + 1)])


def condense_rhs(condensed, rhs=None):
    '''
    The condensed right-hand side g_I = f_I - K_IL K_LL^{-1} f_L.

    Args:
      condensed: a CondensedSystem.
      rhs: velocity load vector, the system's own by default.
    '''
    vector = full_rhs(condensed.system, rhs)
    result = np.zeros(condensed.gdofs)
    positions = condensed.interface_index
    mask = positions >= 0
    result[positions[mask]] = vector[mask]
    for data in condensed.elements:
        if data.factor is None:
            continue
        correction = data.coupling.dot(
            scipy.linalg.lu_solve(data.factor, vector[data.local]))
        np.add.at(result, positions[data.interface], -correction)
    return result


def back_substitute(condensed, interface_solution, rhs=None):
    '''
    Recovers all unknowns from the interface solution.

    Returns:
      the solution over all unknowns [velocity | pressure | multiplier].
    '''
    vector = full_rhs(condensed.system, rhs)
    solution = np.zeros(condensed.n_unknowns)
    mask = condensed.interface_index >= 0
    solution[mask] = interface_solution[condensed.interface_index[mask]]
    for data in condensed.elements:
        if data.factor is None:
            continue
        local_rhs = vector[data.local] - data.coupling.T.dot(
            solution[data.interface])
        solution[data.local] = scipy.linalg.lu_solve(data.factor, local_rhs)
    return solution


def _check_finite(vector, what):
    if not np.all(np.isfinite(vector)):
        raise SolverBreakdownError("Non finite values in the {0}".format(what))
    return vector


def solve_condensed(condensed, rhs=None):
    '''
    Solves the saddle point system by static condensation.

    Args:
      condensed: a CondensedSystem.
      rhs: velocity load vector, the system's own by default.

    Returns:
      the solution over all unknowns [velocity | pressure | multiplier].

    Raises:
      SolverBreakdownError: if the factorization fails.
    '''
    factor = condensed.factorize()
    interface = _check_finite(factor.solve(condense_rhs(condensed, rhs)),
                              "condensed solution")
    return _check_finite(back_substitute(condensed, interface, rhs),
                         "back substituted solution")


def saddle_point_matrix(system):
    ''' The unreduced saddle point matrix as a CSC matrix. '''
    mean = sp.csr_matrix(system.mean_constraint.reshape(-1, 1))
    return sp.bmat([[system.A, system.B.T, None],
                    [system.B, None, mean],
                    [None, mean.T, None]], format='csc')


def solve_monolithic(system, rhs=None):
    '''
    Solves the unreduced saddle point system with a sparse LU factorization.

    Raises:
      SolverBreakdownError: if the factorization fails.
    '''
    matrix = saddle_point_matrix(system)
    try:
        solution = spla.splu(matrix).solve(full_rhs(system, rhs))
    except RuntimeError as err:
        raise SolverBreakdownError("Factorization of the saddle point "
                                   "system failed: {0}".format(err))
    return _check_finite(solution, "monolithic solution")


def split_solution(system, solution):
    ''' Splits a system solution into (velocity, pressure, multiplier). '''
    n_velocity = system.n_velocity
    n_pressure = system.n_pressure
    return (solution[:n_velocity],
            solution[n_velocity:n_velocity + n_pressure],
            float(solution[-1]))
