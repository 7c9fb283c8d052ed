#
# hdgstokes/fespace.py
#
# Copyright (c) 2017 The hdgstokes developers
#
# This software is released under the MIT License.
#
# http://opensource.org/licenses/mit-license.php
#
"""
Global discrete spaces of the HDG Stokes discretization on a triangular mesh:
the (full or relaxed) H(div)-conforming velocity space, the tangential facet
space and the discontinuous pressure space, together with their dof
numbering, the Piola maps and the facet L2 projection.

Velocity coefficients, pressure coefficients and the mean value multiplier
are numbered separately. Velocity numbering puts the interface dofs first
(by facet index, normal orders then tangential orders), followed by the
element local dofs (by element index). Pressure numbering puts one constant
per element first and the higher modes after them.
"""

import collections
import logging

import numpy as np
from scipy import special

from . import mesh as msh
from . import polyquad as pq
from . import refbasis as rb


_LOGGER = logging.getLogger(__name__)

FULL = 'full'
RELAXED = 'relaxed'
MODES = (FULL, RELAXED)

INTERFACE_NORMAL = 'InterfaceNormal'
INTERFACE_TANGENTIAL = 'InterfaceTangential'
LOCAL_CELL = 'LocalCell'
LOCAL_SPLIT_FACET = 'LocalSplitFacet'
PRESSURE_CONST = 'PressureConst'
PRESSURE_HIGH = 'PressureHigh'

UNUSED = -1
"""Marks a local slot without a free global dof (constrained or removed)."""

_SINGULAR_TOL = 1e-14


class SingularMapError(ValueError):
    '''
    Raised when a Piola map is requested for a (nearly) singular element map.
    '''
    pass


class DofMap(object):
    '''
    Global numbering of the velocity, tangential facet and pressure dofs.

    Attributes:
      k, mode, reduced, projected_jumps: the discretization parameters.
      tangential_order: highest order of the tangential facet unknowns.
      vol_dofs: (ne, nb) velocity dof of every local shape function.
      tan_dofs: (ne, 3, tangential_order + 1) tangential dofs per local facet.
      pres_dofs: (ne, np_local) pressure dofs per element.
      velocity_classes, pressure_classes: per dof a (class, data) tuple.
      split_pairs: (facet, dof of left element, dof of right element or
        UNUSED on the boundary) for every split highest-order normal mode.
      n_interface_velocity: number of free interface velocity dofs.
      n_dirichlet: number of coefficients removed by the boundary condition.
    '''

    def __init__(self, k, mode, reduced, projected_jumps):
        self.k = k
        self.mode = mode
        self.reduced = reduced
        self.projected_jumps = projected_jumps
        self.tangential_order = k - 1 if projected_jumps else k
        self.velocity_classes = []
        self.pressure_classes = []
        self.split_pairs = []
        self.n_interface_velocity = 0
        self.n_dirichlet = 0
        self.vol_dofs = None
        self.tan_dofs = None
        self.pres_dofs = None

    @property
    def n_velocity(self):
        return len(self.velocity_classes)

    @property
    def n_pressure(self):
        return len(self.pressure_classes)

    @property
    def n_elements(self):
        return len(self.vol_dofs)

    @property
    def n_dofs(self):
        ''' All coefficients, Dirichlet-constrained facet coefficients included. '''
        return self.n_velocity + self.n_pressure + self.n_dirichlet

    @property
    def n_total_unknowns(self):
        ''' Free unknowns of the saddle point system (with the multiplier). '''
        return self.n_velocity + self.n_pressure + 1

    @property
    def n_gdofs(self):
        ''' Globally coupled unknowns after static condensation. '''
        return self.n_interface_velocity + self.n_elements + 1

    def count(self, dof_class):
        ''' Number of free dofs of one class. '''
        classes = self.pressure_classes \
            if dof_class in (PRESSURE_CONST, PRESSURE_HIGH) \
            else self.velocity_classes
        return sum(1 for name, _ in classes if name == dof_class)

    def add_velocity(self, dof_class, data):
        self.velocity_classes.append((dof_class, data))
        return len(self.velocity_classes) - 1

    def add_pressure(self, dof_class, data):
        self.pressure_classes.append((dof_class, data))
        return len(self.pressure_classes) - 1


def build_dof_map(mesh, k, mode=RELAXED, reduced=False, projected_jumps=True):
    '''
    Numbers the dofs of the velocity, facet and pressure spaces.

    Args:
      mesh: a Mesh.
      k: polynomial order, k >= 1.
      mode: FULL or RELAXED H(div)-conformity.
      reduced: drop the cell functions with nonzero divergence and the
        pressure modes above the element constants.
      projected_jumps: tangential facet unknowns of order k - 1 (the jumps
        are projected in the viscosity form) instead of order k.

    Returns:
      a DofMap.
    '''
    assert k >= 1, "k must be >= 1, got {0}".format(k)
    assert mode in MODES, "mode must be one of {0}, got {1}".format(MODES, mode)
    basis = rb.build_reference_basis(2, k)
    dofs = DofMap(k, mode, reduced, projected_jumps)
    ne = mesh.n_elements
    n_tan = dofs.tangential_order + 1
    shared = k + 1 if mode == FULL else k

    dofs.vol_dofs = np.full((ne, len(basis)), UNUSED, dtype=int)
    dofs.tan_dofs = np.full((ne, 3, n_tan), UNUSED, dtype=int)

    for facet in range(mesh.n_facets):
        owners = mesh.facet_elements[facet]
        locals_ = mesh.facet_local[facet]
        if owners[1] == msh.BOUNDARY:
            dofs.n_dirichlet += (k + 1 if mode == FULL else k) + n_tan
            continue
        for order in range(shared):
            dof = dofs.add_velocity(INTERFACE_NORMAL, (facet, order))
            for element, lf in zip(owners, locals_):
                b = basis.facet_blocks[lf][order][0]
                dofs.vol_dofs[element, b] = dof
        for order in range(n_tan):
            dof = dofs.add_velocity(INTERFACE_TANGENTIAL, (facet, order))
            for element, lf in zip(owners, locals_):
                dofs.tan_dofs[element, lf, order] = dof
    dofs.n_interface_velocity = dofs.n_velocity

    split_dofs = {}
    for element in range(ne):
        for b, phi in enumerate(basis.functions):
            if phi.facet is not None:
                continue
            if reduced and phi.kind == rb.CELL_DIV:
                continue
            dofs.vol_dofs[element, b] = dofs.add_velocity(
                LOCAL_CELL, (element, b))
        if mode == RELAXED:
            for lf in range(3):
                facet = mesh.element_facets[element, lf]
                side = 0 if mesh.facet_elements[facet, 0] == element else 1
                b = basis.facet_blocks[lf][k][0]
                dof = dofs.add_velocity(LOCAL_SPLIT_FACET, (facet, side))
                dofs.vol_dofs[element, b] = dof
                split_dofs.setdefault(facet, [UNUSED, UNUSED])[side] = dof
    dofs.split_pairs = [(facet, pair[0], pair[1])
                        for facet, pair in sorted(split_dofs.items())]

    n_high = 0 if reduced else k * (k + 1) // 2 - 1
    dofs.pres_dofs = np.zeros((ne, 1 + n_high), dtype=int)
    for element in range(ne):
        dofs.pres_dofs[element, 0] = dofs.add_pressure(PRESSURE_CONST,
                                                       (element, 0))
    for element in range(ne):
        for j in range(1, n_high + 1):
            dofs.pres_dofs[element, j] = dofs.add_pressure(PRESSURE_HIGH,
                                                           (element, j))
    _LOGGER.debug("dof map k=%d mode=%s: %d velocity (%d interface), "
                  "%d pressure, %d constrained", k, mode, dofs.n_velocity,
                  dofs.n_interface_velocity, dofs.n_pressure,
                  dofs.n_dirichlet)
    return dofs


def piola_map(affine_map, reference_vector, reference_divergence):
    '''
    Contravariant Piola transformation of vector values and divergences.

    Args:
      affine_map: an AffineMap.
      reference_vector: array whose last axis holds the vector components.
      reference_divergence: scalar or array of divergences.

    Returns:
      (physical vector, physical divergence).

    Raises:
      SingularMapError: if the map is singular.
    '''
    matrix = np.asarray(affine_map.matrix)
    det = affine_map.det
    if abs(det) <= _SINGULAR_TOL * max(1., np.abs(matrix).max() ** 2):
        raise SingularMapError("Singular element map, det = {0}".format(det))
    vector = np.einsum('ij,...j->...i', matrix,
                       np.asarray(reference_vector, dtype=float)) / det
    return vector, np.asarray(reference_divergence, dtype=float) / det


def _piola_gradient(matrix, det, reference_gradient):
    inverse = np.linalg.inv(matrix)
    return np.einsum('ij,...jk,kl->...il', matrix, reference_gradient,
                     inverse) / det


def _reference_facet_points(lf, t):
    corners = pq.REFERENCE_VERTICES[2][list(msh.LOCAL_FACETS[lf])]
    return np.outer(0.5 * (1. - t), corners[0]) \
        + np.outer(0.5 * (1. + t), corners[1])


def sign_fix(mesh, dof_map):
    '''
    Orientation signs of the facet blocks.

    The sign of element e and local facet f multiplies every facet function
    of that block. It is chosen such that the mapped lowest-order normal
    trace points along the global facet normal, which makes both neighbours
    of an interior facet produce the same normal trace for every order.

    Returns:
      an (ne, 3) array of +1 / -1.
    '''
    basis = rb.build_reference_basis(2, dof_map.k)
    midpoints = np.vstack([_reference_facet_points(lf, np.zeros(1))
                           for lf in range(3)])
    values = basis.tabulate(midpoints)[0]
    signs = np.ones((mesh.n_elements, 3))
    for element in range(mesh.n_elements):
        matrix = mesh.jacobian[element]
        det = mesh.det[element]
        for lf in range(3):
            b = basis.facet_blocks[lf][0][0]
            trace = matrix.dot(values[b, lf]) / det
            facet = mesh.element_facets[element, lf]
            signs[element, lf] = 1. if trace.dot(mesh.facet_normal[facet]) > 0. \
                else -1.
    return signs


def facet_polynomials(length, degree, t):
    '''
    Orthonormal facet polynomials sqrt((2o + 1) / |F|) P_o(t), o <= degree,
    at facet parameters t; shape (degree + 1, len(t)).
    '''
    scale = np.sqrt((2. * np.arange(degree + 1) + 1.) / length)
    return scale[:, None] * np.array([special.eval_legendre(o, t)
                                      for o in range(degree + 1)])


class FacetProjection(object):
    '''
    L2(F) projection onto polynomials of degree <= degree along a facet.

    The facet polynomials are the orthonormal scaled Legendre polynomials
    sqrt((2o + 1) / |F|) P_o(t) of the facet parameter t in [-1, 1] running
    from the lower to the higher vertex. Traces are given by their values at
    the facet quadrature points.
    '''

    def __init__(self, mesh, degree, quadrature_degree):
        assert degree >= 0, "degree must be >= 0, got {0}".format(degree)
        self.mesh = mesh
        self.degree = degree
        self.rule = pq.facet_quadrature(1, quadrature_degree)
        self.t = self.rule.points[:, 0]

    def basis_values(self, facet):
        ''' Orthonormal facet basis at the quadrature points, (degree+1, np). '''
        return facet_polynomials(self.mesh.facet_length[facet], self.degree,
                                 self.t)

    def weights(self, facet):
        return self.rule.weights * self.mesh.facet_length[facet] / 2.

    def values(self, facet, coefficients):
        ''' Values at the quadrature points of a coefficient vector. '''
        return np.einsum('op,o...->p...', self.basis_values(facet),
                         np.asarray(coefficients))


def facet_project(projection, facet, trace_values):
    '''
    Orthonormal-basis coefficients of the L2 projection of a facet trace.

    Args:
      projection: a FacetProjection.
      facet: the global facet index.
      trace_values: values at the projection's quadrature points, shape
        (npoints,) or (npoints, ...).

    Returns:
      coefficients of shape (degree + 1,) or (degree + 1, ...).
    '''
    trace_values = np.asarray(trace_values, dtype=float)
    return np.einsum('op,p,p...->o...', projection.basis_values(facet),
                     projection.weights(facet), trace_values)


ElementTable = collections.namedtuple(
    'ElementTable', ['element', 'points', 'weights', 'values', 'gradients',
                     'divergences', 'pressure'])
"""Physical quadrature data of one element: values (nb, np, 2), gradients
(nb, np, 2, 2), divergences (nb, np), pressure basis values (npl, np)."""

FacetTable = collections.namedtuple(
    'FacetTable', ['element', 'local_facet', 'facet', 'points', 'weights',
                   't', 'normal', 'tangent', 'side', 'values', 'gradients'])
"""Physical quadrature data on one facet of one element; normal is the
global facet normal and side is +1 when it points out of the element."""


class StokesSpaces(object):
    '''
    The discrete spaces on a mesh with their tabulated shape functions.

    Tabulations are cached per quadrature degree.
    '''

    def __init__(self, mesh, k, mode=RELAXED, reduced=False,
                 projected_jumps=True):
        self.mesh = mesh
        self.k = k
        self.mode = mode
        self.reduced = reduced
        self.projected_jumps = projected_jumps
        self.basis = rb.build_reference_basis(2, k)
        self.dof_map = build_dof_map(mesh, k, mode, reduced, projected_jumps)
        self.signs = sign_fix(mesh, self.dof_map)
        self.tangential_order = self.dof_map.tangential_order
        self.quadrature_degree = pq.default_degree(k)
        self.projection = FacetProjection(mesh, self.tangential_order,
                                          2 * k + 2)
        self._pressure_exponents = pq.monomial_exponents(
            2, 0 if reduced else k - 1)
        rule = pq.simplex_quadrature(2, 2 * k)
        monomials = pq.monomial_values(self._pressure_exponents, rule.points)
        self._pressure_means = rule.weights.dot(monomials) \
            / pq.REFERENCE_MEASURE[2]
        self._pressure_means[0] = 0.
        self._volume_cache = {}
        self._facet_cache = {}

    @property
    def n_local_velocity(self):
        return len(self.basis) + 3 * (self.tangential_order + 1)

    def local_signs(self, element):
        ''' Sign of every shape function of an element. '''
        signs = np.ones(len(self.basis))
        for lf in range(3):
            for b, _ in self.basis.facet_blocks[lf]:
                signs[b] = self.signs[element, lf]
        return signs

    def pressure_basis(self, ref_points):
        ''' Reference pressure basis values, shape (npl, np). '''
        monomials = pq.monomial_values(self._pressure_exponents, ref_points)
        return (monomials - self._pressure_means).T

    def _reference_volume(self, degree):
        if degree not in self._volume_cache:
            rule = pq.simplex_quadrature(2, degree)
            values, gradients, divergences = self.basis.tabulate(rule.points)
            self._volume_cache[degree] = (rule, values, gradients, divergences,
                                          self.pressure_basis(rule.points))
        return self._volume_cache[degree]

    def _reference_facet(self, lf, degree):
        key = (lf, degree)
        if key not in self._facet_cache:
            rule = pq.facet_quadrature(1, degree)
            t = rule.points[:, 0]
            ref_points = _reference_facet_points(lf, t)
            values, gradients, _ = self.basis.tabulate(ref_points)
            self._facet_cache[key] = (t, rule.weights, ref_points, values,
                                      gradients)
        return self._facet_cache[key]

    def element_tables(self, element, degree=None):
        '''
        Signed, Piola-mapped shape functions at the volume quadrature points.
        '''
        degree = self.quadrature_degree if degree is None else degree
        rule, values, gradients, divergences, pressure = \
            self._reference_volume(degree)
        amap = msh.element_map(self.mesh, element)
        signs = self.local_signs(element)
        values, divergences = piola_map(amap, values, divergences)
        gradients = _piola_gradient(amap.matrix, amap.det, gradients)
        return ElementTable(element, amap.to_physical(rule.points),
                            rule.weights * abs(amap.det),
                            values * signs[:, None, None],
                            gradients * signs[:, None, None, None],
                            divergences * signs[:, None], pressure)

    def facet_tables(self, element, lf, degree=None):
        '''
        Signed, Piola-mapped shape functions at the quadrature points of one
        local facet.
        '''
        degree = 2 * self.k + 2 if degree is None else degree
        t, weights, ref_points, values, gradients = \
            self._reference_facet(lf, degree)
        amap = msh.element_map(self.mesh, element)
        signs = self.local_signs(element)
        values, _ = piola_map(amap, values, 0.)
        gradients = _piola_gradient(amap.matrix, amap.det, gradients)
        facet = self.mesh.element_facets[element, lf]
        side = 1. if self.mesh.facet_elements[facet, 0] == element else -1.
        return FacetTable(element, lf, facet, amap.to_physical(ref_points),
                          weights * self.mesh.facet_length[facet] / 2., t,
                          self.mesh.facet_normal[facet],
                          self.mesh.facet_tangent[facet], side,
                          values * signs[:, None, None],
                          gradients * signs[:, None, None, None])

    def local_coefficients(self, velocity):
        ''' Per element shape function coefficients, shape (ne, nb). '''
        return _gather(np.asarray(velocity, dtype=float),
                       self.dof_map.vol_dofs)

    def facet_coefficients(self, velocity):
        ''' Per element and local facet tangential coefficients. '''
        return _gather(np.asarray(velocity, dtype=float),
                       self.dof_map.tan_dofs)

    def pressure_coefficients(self, pressure):
        ''' Per element pressure coefficients, shape (ne, npl). '''
        return _gather(np.asarray(pressure, dtype=float),
                       self.dof_map.pres_dofs)

    def global_velocity(self, local, facet=None):
        '''
        Global velocity vector from per element coefficients. Shared dofs
        take the value of the last element visited.
        '''
        velocity = np.zeros(self.dof_map.n_velocity)
        mask = self.dof_map.vol_dofs != UNUSED
        velocity[self.dof_map.vol_dofs[mask]] = np.asarray(local)[mask]
        if facet is not None:
            mask = self.dof_map.tan_dofs != UNUSED
            velocity[self.dof_map.tan_dofs[mask]] = np.asarray(facet)[mask]
        return velocity

    def local_vector(self, velocity, element):
        '''
        The local velocity vector [volume coefficients | tangential facet
        coefficients by local facet] of one element.
        '''
        return np.concatenate([
            self.local_coefficients(velocity)[element],
            self.facet_coefficients(velocity)[element].ravel()])

    def local_velocity_dofs(self, element):
        return np.concatenate([self.dof_map.vol_dofs[element],
                               self.dof_map.tan_dofs[element].ravel()])


def _gather(vector, index):
    out = np.zeros(index.shape)
    mask = index != UNUSED
    out[mask] = vector[index[mask]]
    return out


def build_spaces(mesh, k, mode=RELAXED, reduced=False, projected_jumps=True):
    '''
    Builds the StokesSpaces of order k on a mesh.

    Args:
      mesh: a Mesh.
      k: polynomial order, k >= 1.
      mode: FULL or RELAXED.
      reduced: the reduced velocity/pressure pair with piecewise constant
        pressures.
      projected_jumps: project tangential jumps onto P^{k-1}.

    Returns:
      a StokesSpaces.
    '''
    spaces = StokesSpaces(mesh, k, mode, reduced, projected_jumps)
    _LOGGER.info("spaces k=%d mode=%s reduced=%s: %d dofs, %d gdofs",
                 k, mode, reduced, spaces.dof_map.n_dofs,
                 spaces.dof_map.n_gdofs)
    return spaces
