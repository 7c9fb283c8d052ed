#
# hdgstokes/polyquad.py
#
# Copyright (c) 2017 The hdgstokes developers
#
# This software is released under the MIT License.
#
# http://opensource.org/licenses/mit-license.php
#
"""
Jacobi and integrated Jacobi polynomials (beta = 0) and collapsed-coordinate
quadrature rules on the reference simplices.

The reference triangle has vertices (-1, 0), (1, 0), (0, 1) and area 1; the
reference tetrahedron has vertices (-1, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)
and volume 1/3.
"""

import collections
import itertools
import logging

import numpy as np
from scipy import special


_LOGGER = logging.getLogger(__name__)

_DOMAIN_TOL = 1e-12

REFERENCE_VERTICES = {
    2: np.array([[-1., 0.], [1., 0.], [0., 1.]]),
    3: np.array([[-1., 0., 0.], [1., 0., 0.], [0., 1., 0.], [0., 0., 1.]]),
}
"""Vertices of the reference simplices, indexed by dimension."""

REFERENCE_MEASURE = {1: 2., 2: 1., 3: 1. / 3.}


class DomainError(ValueError):
    '''
    Raised when a polynomial is evaluated outside of [-1, 1].
    '''
    pass


QuadratureRule = collections.namedtuple(
    'QuadratureRule', ['points', 'weights', 'exactness_degree'])
"""points has shape (npoints, dim), weights shape (npoints,)."""


class JacobiFamily(collections.namedtuple('JacobiFamily',
                                          ['alpha', 'max_degree'])):
    '''
    The family p_0^alpha, ..., p_max^alpha and its integrated companion.
    '''
    __slots__ = ()

    def values(self, x):
        ''' Returns an array of shape (max_degree + 1,) + shape(x). '''
        return jacobi_table(self.max_degree, self.alpha, x)

    def integrated_values(self, x):
        ''' Same as values for the integrated family p-hat. '''
        return integrated_jacobi_table(self.max_degree, self.alpha, x)


def default_degree(k):
    '''
    Quadrature exactness used for the element integrals of an order k
    discretization: gradient products are of degree 2k - 2 and the
    manufactured force is of degree 5.
    '''
    return max(2 * k + 2, k + 6)


def _ratio(number, numerator, denominator):
    return number(numerator) / number(denominator)


def scaled_jacobi_table(max_degree, alpha, xi, s, number=float):
    '''
    Scaled Jacobi polynomials p_n^alpha(xi / s) * s^n for n = 0..max_degree.

    The scaled forms are polynomials in (xi, s), so the recurrence is written
    without any division by s. The arithmetic is duck typed: xi and s may be
    floats, numpy arrays or sympy expressions.

    Args:
      max_degree: largest degree n.
      alpha: the Jacobi parameter, alpha >= 0.
      xi, s: the numerator and the scaling.
      number: constructor for the recurrence coefficients; pass
        sympy.Rational to keep symbolic expressions exact.

    Returns:
      a list of max_degree + 1 values.
    '''
    assert max_degree >= 0, "max_degree must be >= 0, got {0}".format(max_degree)
    assert alpha >= 0, "alpha must be >= 0, got {0}".format(alpha)
    table = [xi * 0 + 1]
    if max_degree >= 1:
        table.append((number(alpha + 2) * xi + number(alpha) * s)
                     / number(2))
    for n in range(2, max_degree + 1):
        c0 = 2 * n * (n + alpha) * (2 * n + alpha - 2)
        c1 = (2 * n + alpha - 1) * (2 * n + alpha) * (2 * n + alpha - 2)
        c2 = (2 * n + alpha - 1) * alpha * alpha
        c3 = 2 * (n + alpha - 1) * (n - 1) * (2 * n + alpha)
        table.append(((number(c1) * xi + number(c2) * s) * table[n - 1]
                      - number(c3) * s * s * table[n - 2]) / number(c0))
    return table


def scaled_integrated_jacobi_table(max_degree, alpha, xi, s, number=float):
    '''
    Scaled integrated Jacobi polynomials p-hat_n^alpha(xi / s) * s^n.

    p-hat_0 = 1, p-hat_1 = x + 1 and for n >= 2 the integrated polynomial is
    a combination of p_n, p_{n-1} and p_{n-2} of the same family.

    Args and Returns as scaled_jacobi_table.
    '''
    plain = scaled_jacobi_table(max_degree, alpha, xi, s, number)
    table = [xi * 0 + 1]
    if max_degree >= 1:
        table.append(xi + s)
    for n in range(2, max_degree + 1):
        a_n = _ratio(number, 2 * (n + alpha),
                     (2 * n + alpha) * (2 * n + alpha - 1))
        b_n = _ratio(number, 2 * alpha,
                     (2 * n + alpha - 2) * (2 * n + alpha))
        c_n = _ratio(number, 2 * (n - 1),
                     (2 * n + alpha - 1) * (2 * n + alpha - 2))
        table.append(a_n * plain[n] + b_n * s * plain[n - 1]
                     - c_n * s * s * plain[n - 2])
    return table


def _check_domain(x):
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1. + _DOMAIN_TOL):
        raise DomainError(
            "Jacobi polynomials are evaluated on [-1, 1], got {0}".format(
                x[np.abs(x) > 1. + _DOMAIN_TOL].ravel()[0]))
    return x


def jacobi_table(max_degree, alpha, x):
    ''' All p_n^alpha(x), n <= max_degree, stacked along the first axis. '''
    x = _check_domain(x)
    return np.array(scaled_jacobi_table(max_degree, alpha, x, 1.)) \
        * np.ones((1,) + x.shape)


def integrated_jacobi_table(max_degree, alpha, x):
    ''' All p-hat_n^alpha(x), n <= max_degree, stacked along the first axis. '''
    x = _check_domain(x)
    table = np.array(scaled_integrated_jacobi_table(max_degree, alpha, x, 1.)) \
        * np.ones((1,) + x.shape)
    # the integral over an empty interval
    at_left_end = (x == -1.)
    if np.any(at_left_end):
        table[1:] = np.where(at_left_end, 0., table[1:])
    return table


def jacobi_eval(n, alpha, x):
    '''
    Evaluates p_n^alpha(x) by the three-term recurrence.

    Args:
      n: degree, n >= 0.
      alpha: Jacobi parameter, alpha >= 0.
      x: a real or an array of reals in [-1, 1].

    Returns:
      a float for scalar input, an array otherwise.

    Raises:
      DomainError: if |x| > 1 + 1e-12.
    '''
    assert n >= 0, "n must be >= 0, got {0}".format(n)
    value = JacobiFamily(alpha, n).values(x)[n]
    return float(value) if np.ndim(value) == 0 else value


def integrated_jacobi_eval(n, alpha, x):
    '''
    Evaluates p-hat_n^alpha(x), the integral of p_{n-1}^alpha from -1 to x.

    Args, Returns and Raises as jacobi_eval.
    '''
    assert n >= 0, "n must be >= 0, got {0}".format(n)
    value = JacobiFamily(alpha, n).integrated_values(x)[n]
    return float(value) if np.ndim(value) == 0 else value


def jacobi_norm(j, alpha):
    ''' The weighted norm squared 2^(alpha + 1) / (2j + alpha + 1). '''
    return 2. ** (alpha + 1) / (2 * j + alpha + 1)


def _npoints(degree):
    return degree // 2 + 1


def _gauss_jacobi_unit(npoints, alpha):
    '''
    Gauss-Jacobi rule for the weight (1 - y)^alpha on [0, 1].
    '''
    t, w = special.roots_jacobi(npoints, alpha, 0.)
    return 0.5 * (1. + t), w / 2. ** (alpha + 1)


def simplex_quadrature(dim, degree):
    '''
    Collapsed-coordinate quadrature on the reference triangle or
    tetrahedron.

    A Gauss-Legendre rule in the first collapsed coordinate is combined with
    Gauss-Jacobi rules absorbing the Jacobian of the Duffy map
    (x, y) = (x^ (1 - y^), y^) in 2D and
    (x, y, z) = (x^ (1 - y^)(1 - z^), y^ (1 - z^), z^) in 3D.

    Args:
      dim: 2 or 3.
      degree: requested total degree of exactness, >= 0.

    Returns:
      a QuadratureRule.

    Raises:
      ValueError: if dim is not 2 or 3.
    '''
    assert degree >= 0, "degree must be >= 0, got {0}".format(degree)
    if dim not in (2, 3):
        raise ValueError("Unsupported dimension for simplex quadrature: "
                         "{0}".format(dim))
    npoints = _npoints(degree)
    xg, wg = special.roots_legendre(npoints)
    yg, wy = _gauss_jacobi_unit(npoints, 1)

    if dim == 2:
        ym, xm = np.meshgrid(yg, xg, indexing='ij')
        weights = np.outer(wy, wg).ravel()
        points = np.column_stack([(xm * (1. - ym)).ravel(), ym.ravel()])
    else:
        zg, wz = _gauss_jacobi_unit(npoints, 2)
        zm, ym, xm = np.meshgrid(zg, yg, xg, indexing='ij')
        weights = (wz[:, None, None] * wy[None, :, None]
                   * wg[None, None, :]).ravel()
        points = np.column_stack([
            (xm * (1. - ym) * (1. - zm)).ravel(),
            (ym * (1. - zm)).ravel(),
            zm.ravel()])
    _LOGGER.debug("simplex rule dim=%d degree=%d with %d points",
                  dim, degree, len(weights))
    return QuadratureRule(points, weights, degree)


def facet_quadrature(dim_facet, degree):
    '''
    Quadrature on the reference edge [-1, 1] (dim_facet = 1) or on the
    reference triangle (dim_facet = 2).
    '''
    assert degree >= 0, "degree must be >= 0, got {0}".format(degree)
    if dim_facet == 1:
        x, w = special.roots_legendre(_npoints(degree))
        return QuadratureRule(x.reshape(-1, 1), w, degree)
    if dim_facet == 2:
        return simplex_quadrature(2, degree)
    raise ValueError("Unsupported facet dimension: {0}".format(dim_facet))


def monomial_exponents(dim, degree):
    '''
    Exponent tuples of all monomials of total degree <= degree, graded and
    then ordered lexicographically; the constant monomial comes first.
    '''
    if degree < 0:
        return np.zeros((0, dim), dtype=int)
    exponents = [e for total in range(degree + 1)
                 for e in sorted(itertools.product(range(total + 1),
                                                   repeat=dim),
                                 reverse=True)
                 if sum(e) == total]
    return np.array(exponents, dtype=int).reshape(-1, dim)


def monomial_values(exponents, points):
    ''' Values of the monomials at the points, shape (npoints, nmonomials). '''
    points = np.atleast_2d(points)
    return np.prod(points[:, None, :] ** exponents[None, :, :], axis=2)
