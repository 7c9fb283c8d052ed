#
# hdgstokes/refbasis.py
#
# Copyright (c) 2017 The hdgstokes developers
#
# This software is released under the MIT License.
#
# http://opensource.org/licenses/mit-license.php
#
"""
Hierarchical H(div) bases on the reference triangle and tetrahedron built
from scaled integrated Jacobi polynomials.

Every basis function is assembled symbolically from its closed form (curls
included), expanded into monomials with exact rational coefficients and only
then converted to floating point tables. Scaled polynomials p-hat_i(xi/s) s^i
are generated as polynomials in (xi, s), so nothing is ever divided by a
vanishing barycentric combination.
"""

import collections
import functools
import logging

import numpy as np
import sympy

from . import polyquad as pq


_LOGGER = logging.getLogger(__name__)

RT0 = 'RT0'
FACET_HIGH = 'FacetHigh'
CELL_DIV_FREE = 'CellDivFree'
CELL_DIV = 'CellDiv'

LOCAL_FACETS = {
    2: ((0, 1), (1, 2), (0, 2)),
    3: ((0, 1, 2), (0, 2, 3), (0, 1, 3), (1, 2, 3)),
}
"""Local facets as vertex tuples of the reference simplex."""

_SYMBOLS = sympy.symbols('x y z')
_INSIDE_TOL = 1e-12


class OutsideElementError(ValueError):
    '''
    Raised when a basis is evaluated outside the reference simplex.
    '''
    pass


ShapeFunction = collections.namedtuple(
    'ShapeFunction',
    ['kind', 'facet', 'order', 'family', 'order_indices', 'expression'])
"""kind is one of RT0, FACET_HIGH, CELL_DIV_FREE, CELL_DIV; facet is the
local facet (None for cell functions); order is the hierarchical order of
the normal trace (None for cell functions); family names the construction
('a'..'f' for cell functions); expression holds the sympy components."""


def barycentric(dim):
    ''' Barycentric coordinates of the reference simplex as sympy exprs. '''
    half = sympy.Rational(1, 2)
    x, y, z = _SYMBOLS
    if dim == 2:
        return (half * (1 - x - y), half * (1 + x - y), y)
    return (half * (1 - x - y - z), half * (1 + x - y - z), y, z)


def _grad(f, dim):
    return tuple(sympy.diff(f, s) for s in _SYMBOLS[:dim])


def _curl2(f):
    x, y = _SYMBOLS[:2]
    return (sympy.diff(f, y), -sympy.diff(f, x))


def _curl3(vec):
    x, y, z = _SYMBOLS
    return (sympy.diff(vec[2], y) - sympy.diff(vec[1], z),
            sympy.diff(vec[0], z) - sympy.diff(vec[2], x),
            sympy.diff(vec[1], x) - sympy.diff(vec[0], y))


def _cross(a, b):
    return (a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0])


def _scale(vec, factor):
    return tuple(factor * c for c in vec)


def _combine(a, b, sign=1):
    return tuple(p + sign * q for p, q in zip(a, b))


def _integrated(max_degree, alpha, xi, s):
    table = pq.scaled_integrated_jacobi_table(max_degree, alpha, xi, s,
                                              number=sympy.Rational)
    return [sympy.expand(entry) for entry in table]


def _rt0_2d(lam, edge):
    a, b = edge
    return _combine(_scale(_curl2(lam[a]), lam[b]),
                    _scale(_curl2(lam[b]), lam[a]), -1)


def _rt0_3d(lam, face):
    grads = [_grad(l, 3) for l in lam]
    a, b, c = face
    result = (0, 0, 0)
    for p, q, r in ((a, b, c), (b, c, a), (c, a, b)):
        result = _combine(result, _scale(_cross(grads[q], grads[r]), lam[p]))
    return result


def _nedelec0(lam, edge):
    a, b = edge
    return _combine(_scale(_grad(lam[a], 3), lam[b]),
                    _scale(_grad(lam[b], 3), lam[a]), -1)


def _build_2d(k):
    lam = barycentric(2)
    rt0 = []
    facet = []
    for f, (a, b) in enumerate(LOCAL_FACETS[2]):
        rt0.append(ShapeFunction(RT0, f, 0, 'rt0', (0,), _rt0_2d(lam, (a, b))))
        table = _integrated(k + 1, 0, lam[b] - lam[a], lam[b] + lam[a])
        for i in range(1, k + 1):
            facet.append(ShapeFunction(FACET_HIGH, f, i, 'facet', (i,),
                                       _curl2(table[i + 1])))

    u = _integrated(k + 1, 0, lam[1] - lam[0], lam[1] + lam[0])
    family_a = []
    family_c = []
    for i in range(2, k + 1):
        v = _integrated(k + 1 - i, 2 * i - 1, 2 * lam[2] - 1, 1)
        for j in range(1, k + 2 - i):
            family_a.append(ShapeFunction(CELL_DIV_FREE, None, None, 'a',
                                          (i, j), _curl2(u[i] * v[j])))
            family_c.append(ShapeFunction(CELL_DIV, None, None, 'c', (i, j),
                                          _scale(_curl2(u[i]), v[j])))
    family_b = []
    w = _integrated(k - 1, 3, 2 * lam[2] - 1, 1)
    for l in range(1, k):
        family_b.append(ShapeFunction(CELL_DIV, None, None, 'b', (1, l),
                                      _scale(rt0[0].expression, 2 * w[l])))
    return rt0 + facet + family_a + family_b + family_c


def _build_3d(k):
    lam = barycentric(3)
    rt0 = []
    facet = []
    for f, (a, b, c) in enumerate(LOCAL_FACETS[3]):
        rt0.append(ShapeFunction(RT0, f, 0, 'rt0', (0, 0),
                                 _rt0_3d(lam, (a, b, c))))
        u_face = _integrated(k + 1, 0, lam[b] - lam[a], lam[b] + lam[a])
        xi = lam[c] - lam[b] - lam[a]
        s = lam[a] + lam[b] + lam[c]
        n0 = _nedelec0(lam, (a, b))
        entries = []
        v2 = _integrated(k, 3, xi, s)
        for l in range(1, k + 1):
            entries.append(((l, 0), (0, l), _curl3(_scale(n0, v2[l]))))
        for i in range(1, k + 1):
            v = _integrated(k + 1 - i, 2 * i + 1, xi, s)
            grad_u = _grad(u_face[i + 1], 3)
            for j in range(0, k + 1 - i):
                entries.append(((i + j, i), (i, j),
                                _curl3(_scale(grad_u, v[j + 1]))))
        for key, indices, expression in sorted(entries, key=lambda e: e[0]):
            facet.append(ShapeFunction(FACET_HIGH, f, key[0], 'facet',
                                       indices, expression))

    u = _integrated(k + 2, 0, lam[1] - lam[0], lam[1] + lam[0])
    v_cell = {}
    w_cell = {}

    def v_of(i):
        if i not in v_cell:
            v_cell[i] = _integrated(k + 2, 2 * i - 1,
                                    2 * lam[2] - (1 - lam[3]), 1 - lam[3])
        return v_cell[i]

    def w_of(i, j):
        if (i, j) not in w_cell:
            w_cell[(i, j)] = _integrated(k + 2, 2 * i + 2 * j - 2,
                                         2 * lam[3] - 1, 1)
        return w_cell[(i, j)]

    n0 = _nedelec0(lam, (0, 1))
    triples = [(i, j, l) for i in range(2, k + 1) for j in range(1, k + 1)
               for l in range(1, k + 1) if i + j + l <= k + 2]
    pairs = [(j, l) for j in range(1, k + 1) for l in range(1, k + 1)
             if j + l <= k]
    cells = []
    for j, l in pairs:
        cells.append(ShapeFunction(
            CELL_DIV_FREE, None, None, 'a', (2, j, l),
            _curl3(_scale(n0, v_of(2)[j] * w_of(2, j)[l]))))
    for i, j, l in triples:
        cells.append(ShapeFunction(
            CELL_DIV_FREE, None, None, 'b', (i, j, l),
            _curl3(_scale(_grad(u[i], 3), v_of(i)[j] * w_of(i, j)[l]))))
    for i, j, l in triples:
        cells.append(ShapeFunction(
            CELL_DIV_FREE, None, None, 'c', (i, j, l),
            _curl3(_scale(_grad(u[i] * v_of(i)[j], 3), w_of(i, j)[l]))))
    for l in range(1, k):
        cells.append(ShapeFunction(
            CELL_DIV, None, None, 'd', (2, 1, l),
            _scale(rt0[0].expression, 4 * w_of(2, 1)[l])))
    for j, l in pairs:
        cells.append(ShapeFunction(
            CELL_DIV, None, None, 'e', (2, j, l),
            _scale(_cross(n0, _grad(w_of(2, j)[l], 3)), 2 * v_of(2)[j])))
    for i, j, l in triples:
        cells.append(ShapeFunction(
            CELL_DIV, None, None, 'f', (i, j, l),
            _scale(_cross(_grad(u[i], 3), _grad(v_of(i)[j], 3)),
                   w_of(i, j)[l])))
    return rt0 + facet + cells


class ReferenceBasis(object):
    '''
    An ordered, classified H(div) basis of [P^k]^dim on a reference simplex.

    The order is: the RT0 functions (one per facet), then per facet its
    higher order functions by ascending order, then the cell functions.
    facet_blocks[f] lists (index, order) pairs of the functions attached to
    facet f, RT0 first; its last entry is a highest-order function.
    '''

    def __init__(self, dim, k, functions):
        self.dim = dim
        self.k = k
        self.functions = tuple(functions)
        self.facet_blocks = []
        for f in range(len(LOCAL_FACETS[dim])):
            self.facet_blocks.append(
                [(b, phi.order) for b, phi in enumerate(self.functions)
                 if phi.facet == f])
        self._exponents = pq.monomial_exponents(dim, k)
        self._coefficients = self._tabulate_coefficients()
        self._gradient_coefficients = self._differentiate()

    def __len__(self):
        return len(self.functions)

    @property
    def cell_indices(self):
        return [b for b, phi in enumerate(self.functions) if phi.facet is None]

    def indices(self, kind):
        ''' Indices of the functions of the given kind. '''
        return [b for b, phi in enumerate(self.functions) if phi.kind == kind]

    def highest_order_indices(self, facet):
        ''' Indices of the facet functions of order k of one facet. '''
        return [b for b, order in self.facet_blocks[facet] if order == self.k]

    def _tabulate_coefficients(self):
        lookup = dict((tuple(e), m) for m, e in enumerate(self._exponents))
        symbols = _SYMBOLS[:self.dim]
        coefficients = np.zeros((len(self.functions), self.dim,
                                 len(self._exponents)))
        for b, phi in enumerate(self.functions):
            for c, component in enumerate(phi.expression):
                poly = sympy.Poly(sympy.expand(component), *symbols)
                for monomial, value in poly.terms():
                    if value != 0:
                        coefficients[b, c, lookup[monomial]] = float(value)
        return coefficients

    def _differentiate(self):
        lookup = dict((tuple(e), m) for m, e in enumerate(self._exponents))
        gradient = np.zeros(self._coefficients.shape[:2] + (self.dim,)
                            + self._coefficients.shape[2:])
        for m, exponent in enumerate(self._exponents):
            for d in range(self.dim):
                if exponent[d] == 0:
                    continue
                lowered = list(exponent)
                lowered[d] -= 1
                gradient[:, :, d, lookup[tuple(lowered)]] += \
                    exponent[d] * self._coefficients[:, :, m]
        return gradient

    def tabulate(self, points):
        '''
        Values, gradients and divergences at reference points.

        Args:
          points: array of shape (npoints, dim).

        Returns:
          values (nb, npoints, dim), gradients (nb, npoints, dim, dim) with
          gradients[b, p, i, j] = d phi_i / d x_j, divergences (nb, npoints).
        '''
        monomials = pq.monomial_values(self._exponents, points)
        values = np.einsum('bcm,pm->bpc', self._coefficients, monomials)
        gradients = np.einsum('bcdm,pm->bpcd', self._gradient_coefficients,
                              monomials)
        divergences = np.einsum('bpcc->bp', gradients)
        return values, gradients, divergences


@functools.lru_cache(maxsize=None)
def build_reference_basis(dim, k):
    '''
    Builds the hierarchical basis of order k on the reference simplex.

    Instances are cached per (dim, k) and shared.

    Args:
      dim: 2 or 3.
      k: polynomial order, k >= 1.

    Returns:
      a ReferenceBasis.
    '''
    assert dim in (2, 3), "dim must be 2 or 3, got {0}".format(dim)
    if k < 1:
        raise ValueError("The basis order must be >= 1, got {0}".format(k))
    functions = _build_2d(k) if dim == 2 else _build_3d(k)
    basis = ReferenceBasis(dim, k, functions)
    _LOGGER.info("reference basis dim=%d k=%d: %d functions",
                 dim, k, len(basis))
    return basis


def inside_reference(points, dim, tol=_INSIDE_TOL):
    ''' True for points inside the reference simplex (with tolerance). '''
    points = np.atleast_2d(points)
    x = points[:, 0]
    y = points[:, 1]
    if dim == 2:
        lam = [0.5 * (1 - x - y), 0.5 * (1 + x - y), y]
    else:
        z = points[:, 2]
        lam = [0.5 * (1 - x - y - z), 0.5 * (1 + x - y - z), y, z]
    return np.all(np.array(lam) >= -tol, axis=0)


def eval_basis(basis, point):
    '''
    Values and divergences of all basis functions at a single point.

    Returns:
      a list of (vector, divergence) pairs.

    Raises:
      OutsideElementError: if the point is outside the reference simplex.
    '''
    point = np.asarray(point, dtype=float).reshape(1, basis.dim)
    if not inside_reference(point, basis.dim)[0]:
        raise OutsideElementError(
            "Point {0} is outside the reference simplex.".format(point[0]))
    values, _, divergences = basis.tabulate(point)
    return [(values[b, 0], divergences[b, 0]) for b in range(len(basis))]


def facet_geometry(dim, facet):
    '''
    Vertices, unit outward normal and measure of a local facet of the
    reference simplex.
    '''
    vertices = pq.REFERENCE_VERTICES[dim]
    local = LOCAL_FACETS[dim][facet]
    corners = vertices[list(local)]
    opposite = vertices[[v for v in range(dim + 1) if v not in local][0]]
    if dim == 2:
        tangent = corners[1] - corners[0]
        measure = np.linalg.norm(tangent)
        normal = np.array([tangent[1], -tangent[0]]) / measure
    else:
        cross = np.cross(corners[1] - corners[0], corners[2] - corners[0])
        measure = 0.5 * np.linalg.norm(cross)
        normal = cross / np.linalg.norm(cross)
    if normal.dot(corners[0] - opposite) < 0.:
        normal = -normal
    return corners, normal, measure


def facet_rule(dim, facet, degree):
    '''
    A quadrature rule on a local facet of the reference simplex, returned as
    (points in reference coordinates, weights, unit outward normal).
    '''
    corners, normal, measure = facet_geometry(dim, facet)
    rule = pq.facet_quadrature(dim - 1, degree)
    if dim == 2:
        t = rule.points[:, 0]
        points = np.outer(0.5 * (1. - t), corners[0]) \
            + np.outer(0.5 * (1. + t), corners[1])
        weights = rule.weights * measure / 2.
    else:
        x, y = rule.points[:, 0], rule.points[:, 1]
        lam = np.column_stack([0.5 * (1 - x - y), 0.5 * (1 + x - y), y])
        points = lam.dot(corners)
        weights = rule.weights * measure / pq.REFERENCE_MEASURE[2]
    return points, weights, normal


def normal_trace_gram(basis, facet, degree=None):
    ''' Gram matrix of the normal traces of the facet block of a facet. '''
    degree = 2 * basis.k + 2 if degree is None else degree
    points, weights, normal = facet_rule(basis.dim, facet, degree)
    block = [b for b, _ in basis.facet_blocks[facet]]
    values = basis.tabulate(points)[0][block]
    traces = np.einsum('bpi,i->bp', values, normal)
    return np.einsum('bp,cp,p->bc', traces, traces, weights)


def check_normal_orthogonality(basis, facet):
    '''
    Largest off-diagonal entry of the normal trace Gram matrix of a facet,
    relative to its largest diagonal entry.
    '''
    gram = normal_trace_gram(basis, facet)
    off = gram - np.diag(np.diag(gram))
    return float(np.abs(off).max() / np.abs(np.diag(gram)).max())


def check_trace_support(basis, facet):
    '''
    Largest normal trace on a facet among the functions that are not
    attached to it.
    '''
    points, _, normal = facet_rule(basis.dim, facet, 2 * basis.k + 2)
    block = set(b for b, _ in basis.facet_blocks[facet])
    others = [b for b in range(len(basis)) if b not in block]
    if not others:
        return 0.
    values = basis.tabulate(points)[0][others]
    return float(np.abs(np.einsum('bpi,i->bp', values, normal)).max())


def check_highest_order_volume_orthogonality(basis):
    '''
    Largest |(phi, q)| over the highest-order facet functions phi and the
    monomial vector fields q of degree <= k - 2.
    '''
    if basis.k < 2:
        return 0.
    rule = pq.simplex_quadrature(basis.dim, 2 * basis.k)
    highest = [b for f in range(len(basis.facet_blocks))
               for b in basis.highest_order_indices(f)]
    values = basis.tabulate(rule.points)[0][highest]
    monomials = pq.monomial_values(
        pq.monomial_exponents(basis.dim, basis.k - 2), rule.points)
    moments = np.einsum('bpi,pm,p->bim', values, monomials, rule.weights)
    return float(np.abs(moments).max())
