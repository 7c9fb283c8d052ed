#
# hdgstokes/mesh.py
#
# Copyright (c) 2017 The hdgstokes developers
#
# This software is released under the MIT License.
#
# http://opensource.org/licenses/mit-license.php
#
"""
Triangular meshes of the unit square with oriented facets, uniform red
refinement and affine element maps onto the reference triangle
(-1, 0), (1, 0), (0, 1).
"""

import collections
import logging
import os

import numpy as np


_LOGGER = logging.getLogger(__name__)

LOCAL_FACETS = ((0, 1), (1, 2), (0, 2))
"""Local vertex pairs of the three facets of a triangle. Since element
vertices are sorted by global index, every facet runs from its lower to its
higher global vertex in both adjacent elements."""

BOUNDARY = -1


class MeshError(Exception):
    '''
    Raised when a mesh violates its topological or geometric invariants.
    '''
    pass


class AffineMap(collections.namedtuple(
        'AffineMap', ['matrix', 'offset', 'det', 'inverse_transpose'])):
    '''
    x = matrix . x_ref + offset.
    '''
    __slots__ = ()

    def to_physical(self, ref_points):
        ''' Maps reference points of shape (n, 2) to physical points. '''
        return np.atleast_2d(ref_points).dot(self.matrix.T) + self.offset

    def to_reference(self, points):
        ''' Inverse of to_physical. '''
        return (np.atleast_2d(points) - self.offset).dot(self.inverse_transpose)


class Mesh(object):
    '''
    A conforming triangular mesh.

    Attributes:
      vertices: (nv, 2) coordinates.
      elements: (ne, 3) vertex indices, each row sorted ascending.
      facets: (nf, 2) vertex index pairs, sorted ascending.
      facet_elements: (nf, 2) left and right element, right is BOUNDARY (-1)
        on the boundary. The left element has the lower index.
      facet_local: (nf, 2) local facet index in the left / right element.
      element_facets: (ne, 3) global facet of each local facet.
      facet_normal: (nf, 2) unit normal from the left to the right element,
        outward on the boundary.
      facet_length: (nf,) facet lengths.
      jacobian, offset, det: the affine maps from the reference triangle.
      area: (ne,) element areas.
      h: (ne,) longest edge per element.
    '''

    def __init__(self, vertices, elements):
        self.vertices = np.array(vertices, dtype=float).reshape(-1, 2)
        self.elements = np.sort(np.array(elements, dtype=int).reshape(-1, 3),
                                axis=1)
        if len(self.elements) and (self.elements.min() < 0 or
                                   self.elements.max() >= len(self.vertices)):
            raise MeshError("Element vertex indices out of range.")
        self._build_geometry()
        self._build_facets()
        _LOGGER.debug("mesh with %d vertices, %d elements, %d facets",
                      self.n_vertices, self.n_elements, self.n_facets)

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_elements(self):
        return len(self.elements)

    @property
    def n_facets(self):
        return len(self.facets)

    @property
    def interior_facets(self):
        return np.flatnonzero(self.facet_elements[:, 1] != BOUNDARY)

    @property
    def boundary_facets(self):
        return np.flatnonzero(self.facet_elements[:, 1] == BOUNDARY)

    @property
    def h_max(self):
        return float(self.h.max())

    def _build_geometry(self):
        a = self.vertices[self.elements[:, 0]]
        b = self.vertices[self.elements[:, 1]]
        c = self.vertices[self.elements[:, 2]]
        first = 0.5 * (b - a)
        second = (c - a) - 0.5 * (b - a)
        self.jacobian = np.stack([first, second], axis=2)
        self.offset = 0.5 * (a + b)
        self.det = first[:, 0] * second[:, 1] - first[:, 1] * second[:, 0]
        self.area = np.abs(self.det)
        edges = np.stack([np.linalg.norm(b - a, axis=1),
                          np.linalg.norm(c - b, axis=1),
                          np.linalg.norm(c - a, axis=1)], axis=1)
        self.h = edges.max(axis=1)
        self.centroid = (a + b + c) / 3.

    def _build_facets(self):
        index = {}
        facets = []
        owners = []
        local = []
        self.element_facets = np.zeros((self.n_elements, 3), dtype=int)
        for e, element in enumerate(self.elements):
            for f, (i, j) in enumerate(LOCAL_FACETS):
                key = (element[i], element[j])
                if key not in index:
                    index[key] = len(facets)
                    facets.append(key)
                    owners.append([e, BOUNDARY])
                    local.append([f, BOUNDARY])
                else:
                    g = index[key]
                    if owners[g][1] != BOUNDARY:
                        raise MeshError("Facet {0} is shared by more than two "
                                        "elements.".format(key))
                    owners[g][1] = e
                    local[g][1] = f
                self.element_facets[e, f] = index[key]
        self.facets = np.array(facets, dtype=int).reshape(-1, 2)
        self.facet_elements = np.array(owners, dtype=int).reshape(-1, 2)
        self.facet_local = np.array(local, dtype=int).reshape(-1, 2)

        p = self.vertices[self.facets[:, 0]]
        q = self.vertices[self.facets[:, 1]]
        self.facet_length = np.linalg.norm(q - p, axis=1)
        self.facet_tangent = (q - p) / self.facet_length[:, None]
        normal = np.column_stack([self.facet_tangent[:, 1],
                                  -self.facet_tangent[:, 0]])
        midpoint = 0.5 * (p + q)
        outward = np.einsum('fi,fi->f', normal,
                            midpoint - self.centroid[self.facet_elements[:, 0]])
        self.facet_normal = np.where(outward[:, None] < 0., -normal, normal)
        self.facet_midpoint = midpoint

    def element_height(self, element, local_facet):
        ''' Extent of the element normal to one of its facets, 2|T| / |F|. '''
        facet = self.element_facets[element, local_facet]
        return 2. * self.area[element] / self.facet_length[facet]


def element_map(mesh, element_index):
    '''
    Returns the AffineMap of an element.

    Args:
      mesh: a Mesh.
      element_index: index of the element.

    Raises:
      IndexError: if the index is out of range.
    '''
    if not 0 <= element_index < mesh.n_elements:
        raise IndexError("Element index {0} out of range [0, {1}).".format(
            element_index, mesh.n_elements))
    matrix = mesh.jacobian[element_index]
    return AffineMap(matrix, mesh.offset[element_index],
                     float(mesh.det[element_index]),
                     np.linalg.inv(matrix).T)


def unit_square_mesh(n_subdiv):
    '''
    Structured mesh of [0, 1]^2: n^2 squares, each split into two triangles
    along the diagonal from its lower left to its upper right corner.
    '''
    assert n_subdiv >= 1, "n_subdiv must be >= 1, got {0}".format(n_subdiv)
    n = n_subdiv
    grid = np.linspace(0., 1., n + 1)
    xs, ys = np.meshgrid(grid, grid)
    vertices = np.column_stack([xs.ravel(), ys.ravel()])

    def vid(i, j):
        return j * (n + 1) + i

    elements = []
    for j in range(n):
        for i in range(n):
            elements.append((vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)))
            elements.append((vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)))
    return Mesh(vertices, elements)


def refine(mesh):
    '''
    Uniform red refinement: every triangle is split into four by its edge
    midpoints. Midpoint vertices are appended in facet order.
    '''
    midpoints = mesh.n_vertices + np.arange(mesh.n_facets)
    vertices = np.vstack([mesh.vertices, mesh.facet_midpoint])
    elements = []
    for e, (a, b, c) in enumerate(mesh.elements):
        m_ab, m_bc, m_ac = midpoints[mesh.element_facets[e]]
        elements.extend([(a, m_ab, m_ac), (m_ab, b, m_bc),
                         (m_ac, m_bc, c), (m_ab, m_bc, m_ac)])
    return Mesh(vertices, elements)


def check_mesh(mesh, tol=1e-12):
    '''
    Verifies the mesh invariants.

    Raises:
      MeshError: on a degenerate element, a facet with a wrong number of
        neighbours or an inconsistently oriented facet normal.
    '''
    if np.any(mesh.area <= tol):
        raise MeshError("Degenerate element(s): {0}".format(
            np.flatnonzero(mesh.area <= tol)))
    counts = np.bincount(mesh.element_facets.ravel(),
                         minlength=mesh.n_facets)
    expected = np.where(mesh.facet_elements[:, 1] == BOUNDARY, 1, 2)
    if np.any(counts != expected):
        raise MeshError("Facet neighbour counts are inconsistent.")
    for side in (0, 1):
        owners = mesh.facet_elements[:, side]
        valid = owners != BOUNDARY
        direction = mesh.facet_midpoint[valid] - mesh.centroid[owners[valid]]
        sign = 1. if side == 0 else -1.
        outward = sign * np.einsum('fi,fi->f', mesh.facet_normal[valid],
                                   direction)
        if np.any(outward <= 0.):
            raise MeshError("Facet normal orientation is inconsistent.")
    if np.any(mesh.facet_elements[mesh.interior_facets, 0]
              >= mesh.facet_elements[mesh.interior_facets, 1]):
        raise MeshError("Left element must have the lower index.")


def write_mesh(mesh, target):
    '''
    Writes the mesh in the plain-text format: a header line
    `dim n_vertices n_elements`, vertex coordinate lines, element index lines.
    The target folder is created if needed.
    '''
    folder = os.path.dirname(target)
    if folder and not os.path.exists(folder):
        os.makedirs(folder)
    with open(target, "w") as fp:
        fp.write("2 {0} {1}\n".format(mesh.n_vertices, mesh.n_elements))
        for x, y in mesh.vertices:
            fp.write("{0:.17g} {1:.17g}\n".format(x, y))
        for a, b, c in mesh.elements:
            fp.write("{0} {1} {2}\n".format(a, b, c))


def read_mesh(filepath):
    '''
    Reads a mesh written by write_mesh.

    Raises:
      MeshError: on a malformed file.
    '''
    with open(filepath) as fp:
        lines = [line.split() for line in fp if line.strip()]
    try:
        dim, n_vertices, n_elements = [int(v) for v in lines[0]]
        vertices = [[float(v) for v in line] for line in
                    lines[1:1 + n_vertices]]
        elements = [[int(v) for v in line] for line in
                    lines[1 + n_vertices:1 + n_vertices + n_elements]]
    except (IndexError, ValueError) as err:
        raise MeshError("Malformed mesh file {0}: {1}".format(filepath, err))
    if dim != 2 or len(vertices) != n_vertices or len(elements) != n_elements:
        raise MeshError("Malformed mesh file {0}.".format(filepath))
    return Mesh(vertices, elements)
