#
# hdgstokes/assembly.py
#
# Copyright (c) 2017 The hdgstokes developers
#
# This software is released under the MIT License.
#
# http://opensource.org/licenses/mit-license.php
#
"""
Assembly of the HDG Stokes operators: the interior penalty viscosity form
with projected tangential jumps, the divergence form, the load vectors of
the basic and the pressure robust discretization, the averaging
reconstruction and the BDM interpolation.

Local velocity vectors are ordered [shape function coefficients |
tangential facet coefficients of local facet 0, 1, 2].
"""

import collections
import logging
import warnings

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from . import fespace as fs
from . import mesh as msh
from . import polyquad as pq


_LOGGER = logging.getLogger(__name__)

DEFAULT_LAMBDA = 4.


class AssemblyError(Exception):
    '''
    Raised when an operator cannot be built for the given spaces, or when a
    built operator fails its sanity check.
    '''
    pass


LocalMatrices = collections.namedtuple(
    'LocalMatrices', ['viscosity', 'divergence', 'norm'])
"""Element matrices: viscosity without the factor nu, divergence (pressure
rows by velocity columns) and the discrete H1-like norm matrix."""


class StokesSystem(collections.namedtuple(
        'StokesSystem', ['spaces', 'A', 'B', 'rhs', 'mean_constraint',
                         'local', 'lam', 'nu'])):
    '''
    The assembled saddle point system

        [ A  B^T  0 ] [u]   [rhs]
        [ B   0   m ] [p] = [ 0 ]
        [ 0  m^T  0 ] [mu]  [ 0 ]

    over the free velocity and pressure dofs, m the mean value constraint.
    '''
    __slots__ = ()

    @property
    def n_velocity(self):
        return self.A.shape[0]

    @property
    def n_pressure(self):
        return self.B.shape[0]

    def with_rhs(self, rhs):
        return self._replace(rhs=np.asarray(rhs, dtype=float))


def _facet_terms(spaces, table):
    '''
    Projected tangential jump and normal flux functionals on one facet.

    Row o of each returned matrix maps a local velocity vector to the
    coefficient of the o-th orthonormal facet polynomial.
    '''
    nb = len(spaces.basis)
    n_tan = spaces.tangential_order + 1
    size = spaces.n_local_velocity
    normal = table.side * table.normal
    tangential = np.einsum('bpi,i->bp', table.values, table.tangent)
    flux = np.einsum('bpij,j,i->bp', table.gradients, normal, table.tangent)
    jump = np.zeros((n_tan, size))
    jump[:, :nb] = fs.facet_project(spaces.projection, table.facet,
                                    tangential.T)
    start = nb + table.local_facet * n_tan
    jump[:, start:start + n_tan] = -np.eye(n_tan)
    derivative = np.zeros((n_tan, size))
    derivative[:, :nb] = fs.facet_project(spaces.projection, table.facet,
                                          flux.T)
    return jump, derivative


def local_matrices(spaces, element, lam=DEFAULT_LAMBDA):
    '''
    Element matrices of the viscosity form (nu = 1), the divergence form and
    the discrete norm.

    Args:
      spaces: a StokesSpaces.
      element: the element index.
      lam: the stabilization parameter.

    Returns:
      a LocalMatrices.
    '''
    nb = len(spaces.basis)
    size = spaces.n_local_velocity
    table = spaces.element_tables(element)
    gradient = np.einsum('bpij,cpij,p->bc', table.gradients, table.gradients,
                         table.weights)
    viscosity = np.zeros((size, size))
    norm = np.zeros((size, size))
    viscosity[:nb, :nb] = gradient
    norm[:nb, :nb] = gradient
    penalty = lam * spaces.k ** 2
    for lf in range(3):
        jump, derivative = _facet_terms(spaces, spaces.facet_tables(element, lf))
        h = spaces.mesh.element_height(element, lf)
        jump_mass = jump.T.dot(jump)
        coupling = derivative.T.dot(jump)
        viscosity += penalty / h * jump_mass - coupling - coupling.T
        norm += jump_mass / h
    divergence = np.zeros((spaces.dof_map.pres_dofs.shape[1], size))
    divergence[:, :nb] = -np.einsum('ap,bp,p->ab', table.pressure,
                                    table.divergences, table.weights)
    return LocalMatrices(viscosity, divergence, norm)


def _scatter(rows, cols, blocks, shape):
    ''' Sums element blocks into a CSR matrix, skipping unused slots. '''
    data_r = []
    data_c = []
    data_v = []
    for row, col, block in zip(rows, cols, blocks):
        rmask = row != fs.UNUSED
        cmask = col != fs.UNUSED
        sub = block[np.ix_(rmask, cmask)]
        rr, cc = np.meshgrid(row[rmask], col[cmask], indexing='ij')
        data_r.append(rr.ravel())
        data_c.append(cc.ravel())
        data_v.append(sub.ravel())
    if not data_v:
        return sp.csr_matrix(shape)
    matrix = sp.coo_matrix((np.concatenate(data_v),
                            (np.concatenate(data_r), np.concatenate(data_c))),
                           shape=shape)
    return matrix.tocsr()


def _velocity_dofs(spaces):
    return [spaces.local_velocity_dofs(e)
            for e in range(spaces.mesh.n_elements)]


def assemble_A(spaces, nu, lam=DEFAULT_LAMBDA, local=None):
    '''
    Assembles the viscosity operator over the free velocity dofs.

    Args:
      spaces: a StokesSpaces.
      nu: the viscosity, nu > 0.
      lam: the stabilization parameter, lam > 0.
      local: precomputed LocalMatrices per element (optional).

    Returns:
      a scipy.sparse CSR matrix.
    '''
    assert nu > 0, "nu must be positive, got {0}".format(nu)
    assert lam > 0, "lambda must be positive, got {0}".format(lam)
    if local is None:
        local = [local_matrices(spaces, e, lam)
                 for e in range(spaces.mesh.n_elements)]
    dofs = _velocity_dofs(spaces)
    n = spaces.dof_map.n_velocity
    return nu * _scatter(dofs, dofs, [m.viscosity for m in local], (n, n))


def assemble_B(spaces, local=None):
    '''
    Assembles B(u, q) = - sum_T int_T q div u over the free dofs.

    Returns:
      a CSR matrix with one row per pressure dof.
    '''
    if local is None:
        local = [local_matrices(spaces, e)
                 for e in range(spaces.mesh.n_elements)]
    dofs = _velocity_dofs(spaces)
    shape = (spaces.dof_map.n_pressure, spaces.dof_map.n_velocity)
    return _scatter(list(spaces.dof_map.pres_dofs), dofs,
                    [m.divergence for m in local], shape)


def assemble_norm(spaces, local=None):
    ''' The discrete norm matrix over the free velocity dofs. '''
    if local is None:
        local = [local_matrices(spaces, e)
                 for e in range(spaces.mesh.n_elements)]
    dofs = _velocity_dofs(spaces)
    n = spaces.dof_map.n_velocity
    return _scatter(dofs, dofs, [m.norm for m in local], (n, n))


def assemble_rhs_basic(spaces, force, degree=None):
    '''
    The load vector f(v) = int f . v_T.

    Args:
      spaces: a StokesSpaces.
      force: callable mapping points (np, 2) to values (np, 2), or None for
        a vanishing force.
      degree: quadrature exactness, at least k + 6 by default.

    Returns:
      a vector over the free velocity dofs.
    '''
    rhs = np.zeros(spaces.dof_map.n_velocity)
    if force is None:
        return rhs
    for element in range(spaces.mesh.n_elements):
        table = spaces.element_tables(element, degree)
        values = np.asarray(force(table.points), dtype=float).reshape(-1, 2)
        load = np.einsum('bpi,pi,p->b', table.values, values, table.weights)
        dofs = spaces.dof_map.vol_dofs[element]
        mask = dofs != fs.UNUSED
        np.add.at(rhs, dofs[mask], load[mask])
    return rhs


def mean_constraint(spaces):
    ''' Coefficients of the functional q -> int q over the pressure dofs. '''
    constraint = np.zeros(spaces.dof_map.n_pressure)
    constraint[spaces.dof_map.pres_dofs[:, 0]] = spaces.mesh.area
    return constraint


def assemble_system(spaces, nu, force=None, lam=DEFAULT_LAMBDA):
    '''
    Assembles the complete saddle point system of the basic discretization.

    Returns:
      a StokesSystem.
    '''
    assert nu > 0, "nu must be positive, got {0}".format(nu)
    local = [local_matrices(spaces, e, lam)
             for e in range(spaces.mesh.n_elements)]
    A = assemble_A(spaces, nu, lam, local)
    B = assemble_B(spaces, local)
    rhs = assemble_rhs_basic(spaces, force)
    _LOGGER.info("assembled system: %d velocity, %d pressure dofs, "
                 "nnz(A)=%d, nnz(B)=%d", A.shape[0], B.shape[0], A.nnz, B.nnz)
    return StokesSystem(spaces, A, B, rhs, mean_constraint(spaces), local,
                        lam, nu)


def check_coercivity(system, tol=1e-12):
    '''
    Smallest eigenvalue of the (Dirichlet-constrained) viscosity operator.

    Raises:
      AssemblyError: if the operator is not positive definite.
    '''
    dense = system.A.toarray()
    smallest = scipy.linalg.eigvalsh(dense, subset_by_index=[0, 0])[0]
    if smallest <= tol * np.abs(dense).max():
        raise AssemblyError(
            "Viscosity operator is not positive definite for lambda={0}: "
            "smallest eigenvalue {1}".format(system.lam, smallest))
    return float(smallest)


class ReconstructionMatrix(object):
    '''
    The averaging reconstruction on velocity coefficients.

    On every interior facet the two split highest-order coefficients are
    replaced by their mean, on boundary facets the split coefficient is set
    to zero; all other rows are the identity.
    '''

    def __init__(self, matrix, split_pairs):
        self.matrix = matrix
        self.split_pairs = split_pairs

    @property
    def shape(self):
        return self.matrix.shape

    def apply(self, velocity):
        return self.matrix.dot(np.asarray(velocity, dtype=float))

    def transpose_apply(self, vector):
        return self.matrix.T.dot(np.asarray(vector, dtype=float))


def build_reconstruction(spaces):
    '''
    Builds the averaging reconstruction of a relaxed space.

    Raises:
      AssemblyError: if the spaces are fully H(div)-conforming.
    '''
    if spaces.mode != fs.RELAXED:
        raise AssemblyError("Reconstruction requires relaxed H(div)-"
                            "conformity, got mode {0}".format(spaces.mode))
    n = spaces.dof_map.n_velocity
    diagonal = np.ones(n)
    rows = []
    cols = []
    data = []
    for _, left, right in spaces.dof_map.split_pairs:
        diagonal[left] = 0.
        if right == fs.UNUSED:
            continue
        diagonal[right] = 0.
        for r in (left, right):
            for c in (left, right):
                rows.append(r)
                cols.append(c)
                data.append(0.5)
    keep = np.flatnonzero(diagonal)
    rows = np.concatenate([keep, np.array(rows, dtype=int)])
    cols = np.concatenate([keep, np.array(cols, dtype=int)])
    data = np.concatenate([np.ones(len(keep)), np.array(data)])
    matrix = sp.coo_matrix((data, (rows, cols)), shape=(n, n)).tocsr()
    return ReconstructionMatrix(matrix, spaces.dof_map.split_pairs)


def assemble_rhs_pr(rhs_basic, reconstruction):
    '''
    The pressure robust load vector f(R v) as the transpose action of R.
    '''
    return reconstruction.transpose_apply(rhs_basic)


def _nedelec_test_functions(spaces, element, points):
    '''
    A basis of the Nedelec space of the first kind used for the BDM volume
    moments, in centered and scaled physical coordinates. Returns an array
    of shape (nq, np, 2).
    '''
    k = spaces.k
    if k < 2:
        return np.zeros((0, len(points), 2))
    xi = (points - spaces.mesh.centroid[element]) / spaces.mesh.h[element]
    functions = []
    full = pq.monomial_values(pq.monomial_exponents(2, k - 2), xi)
    zero = np.zeros(len(points))
    for m in range(full.shape[1]):
        functions.append(np.column_stack([full[:, m], zero]))
        functions.append(np.column_stack([zero, full[:, m]]))
    top = [(a, k - 2 - a) for a in range(k - 1)]
    for a, b in top:
        value = xi[:, 0] ** a * xi[:, 1] ** b
        functions.append(np.column_stack([-xi[:, 1] * value,
                                          xi[:, 0] * value]))
    return np.array(functions)


def _normal_moments(spaces, local):
    n_mom = spaces.k + 1
    moments = np.zeros((spaces.mesh.n_elements, 3, n_mom))
    rows = np.zeros((spaces.mesh.n_elements, 3, n_mom, len(spaces.basis)))
    for element in range(spaces.mesh.n_elements):
        for lf in range(3):
            table = spaces.facet_tables(element, lf)
            legendre = fs.facet_polynomials(
                spaces.mesh.facet_length[table.facet], spaces.k, table.t)
            traces = np.einsum('bpi,i->bp', table.values, table.normal)
            rows[element, lf] = (legendre * table.weights).dot(traces.T)
            moments[element, lf] = rows[element, lf].dot(local[element])
    return moments, rows


def bdm_interpolate(spaces, velocity):
    '''
    BDM interpolation of a velocity field of the discrete space.

    The interpolant matches, on every facet, the moments of the averaged
    normal trace against P^k(F) (the own trace on boundary facets) and, in
    every element, the moments against the Nedelec space of degree k - 1.

    Args:
      spaces: a non reduced StokesSpaces.
      velocity: coefficients over the free velocity dofs.

    Returns:
      per element shape function coefficients, shape (ne, nb).

    Raises:
      AssemblyError: on a singular local moment system.
    '''
    assert not spaces.reduced, "BDM interpolation needs the complete basis"
    mesh = spaces.mesh
    local = spaces.local_coefficients(velocity)
    moments, rows = _normal_moments(spaces, local)
    result = np.zeros_like(local)
    for element in range(mesh.n_elements):
        facet_rows = []
        facet_rhs = []
        for lf in range(3):
            facet = mesh.element_facets[element, lf]
            target = moments[element, lf]
            owners = mesh.facet_elements[facet]
            if owners[1] != msh.BOUNDARY:
                other = owners[1] if owners[0] == element else owners[0]
                other_lf = mesh.facet_local[facet][
                    0 if owners[0] == other else 1]
                target = 0.5 * (target + moments[other, other_lf])
            facet_rows.append(rows[element, lf])
            facet_rhs.append(target)
        table = spaces.element_tables(element)
        tests = _nedelec_test_functions(spaces, element, table.points)
        volume_rows = np.einsum('qpi,bpi,p->qb', tests, table.values,
                                table.weights)
        field = np.einsum('b,bpi->pi', local[element], table.values)
        volume_rhs = np.einsum('qpi,pi,p->q', tests, field, table.weights)
        matrix = np.vstack(facet_rows + [volume_rows])
        rhs = np.concatenate(facet_rhs + [volume_rhs])
        try:
            with warnings.catch_warnings():
                warnings.simplefilter('error', scipy.linalg.LinAlgWarning)
                result[element] = scipy.linalg.solve(matrix, rhs)
        except (scipy.linalg.LinAlgError, scipy.linalg.LinAlgWarning) as err:
            raise AssemblyError("Singular BDM moment system on element "
                                "{0}: {1}".format(element, err))
    return result
