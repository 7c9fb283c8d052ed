#
# hdgstokes/analysis.py
#
# Copyright (c) 2017 The hdgstokes developers
#
# This software is released under the MIT License.
#
# http://opensource.org/licenses/mit-license.php
#
"""
Manufactured solutions, error norms, convergence studies, viscosity sweeps
and cost accounting.
"""

import collections
import concurrent.futures
import logging

import numpy as np
import sympy

from . import assembly as asm
from . import condense as cd
from . import fespace as fs
from . import mesh as msh
from . import solve as sv


_LOGGER = logging.getLogger(__name__)


ManufacturedCase = collections.namedtuple(
    'ManufacturedCase',
    ['velocity', 'velocity_gradient', 'pressure', 'force', 'nu',
     'expressions'])
"""Evaluators map points (np, 2) to values (np, 2), gradients (np, 2, 2)
with gradient[p, i, j] = d u_i / d x_j, and pressures (np,)."""

ErrorReport = collections.namedtuple(
    'ErrorReport',
    ['l2_velocity', 'h1_velocity', 'energy', 'l2_pressure', 'div_l2',
     'normal_jump_l2', 'normal_jump_proj_l2', 'tangential_jump_norm',
     'dofs', 'gdofs', 'nze'])

ConvergenceRow = collections.namedtuple(
    'ConvergenceRow', ['level', 'h', 'elements', 'report'])

ConvergenceTable = collections.namedtuple(
    'ConvergenceTable',
    ['k', 'mode', 'variant', 'reconstructed', 'nu', 'rows', 'rates'])
"""rates[i] holds the rates between level i - 1 and i (None for i = 0)."""

NuSweepRow = collections.namedtuple(
    'NuSweepRow', ['nu', 'h1_basic', 'h1_pr', 'l2_basic', 'l2_pr'])

RATE_FIELDS = ('l2_velocity', 'h1_velocity', 'energy', 'l2_pressure')


def _evaluator(expressions, symbols):
    functions = [sympy.lambdify(symbols, e, 'numpy') for e in expressions]

    def evaluate(points):
        points = np.atleast_2d(points)
        x, y = points[:, 0], points[:, 1]
        return np.stack([np.broadcast_to(np.asarray(f(x, y), dtype=float),
                                         x.shape) for f in functions],
                        axis=-1)
    return evaluate


def manufactured_case(dim=2, nu=1., stream=None, pressure=None):
    '''
    A smooth Stokes solution on the unit square with u = curl(stream).

    The force is f = -nu Laplace(u) + grad(p), the data of the momentum
    equation with the pressure entering through B(v, p) = -int p div v.

    Args:
      dim: only 2 is supported.
      nu: the viscosity.
      stream: sympy expression in x, y (default x^2 (x-1)^2 y^2 (y-1)^2).
      pressure: sympy expression in x, y (default x^5 + y^5 - 1/3).

    Returns:
      a ManufacturedCase.
    '''
    assert dim == 2, "Only the 2D manufactured case is available."
    assert nu > 0, "nu must be positive, got {0}".format(nu)
    x, y = sympy.symbols('x y')
    if stream is None:
        stream = x ** 2 * (x - 1) ** 2 * y ** 2 * (y - 1) ** 2
    if pressure is None:
        pressure = x ** 5 + y ** 5 - sympy.Rational(1, 3)
    velocity = (sympy.diff(stream, y), -sympy.diff(stream, x))
    gradient = [sympy.diff(c, s) for c in velocity for s in (x, y)]
    force = [-nu * (sympy.diff(c, x, 2) + sympy.diff(c, y, 2))
             + sympy.diff(pressure, s) for c, s in zip(velocity, (x, y))]
    gradient_eval = _evaluator(gradient, (x, y))
    pressure_eval = _evaluator([pressure], (x, y))
    return ManufacturedCase(
        _evaluator(velocity, (x, y)),
        lambda points: gradient_eval(points).reshape(-1, 2, 2),
        lambda points: pressure_eval(points)[:, 0],
        _evaluator(force, (x, y)), nu,
        {'stream': stream, 'velocity': velocity, 'pressure': pressure,
         'force': force})


def error_degree(k):
    return 2 * max(k, 7)


def _normal_jumps(spaces, volume, degree):
    ''' (||[[u.n]]||, ||Pi^{k-1}[[u.n]]||) summed over all facets. '''
    mesh = spaces.mesh
    full = 0.
    projected = 0.
    for facet in range(mesh.n_facets):
        traces = []
        for element, lf in zip(mesh.facet_elements[facet],
                               mesh.facet_local[facet]):
            if element == msh.BOUNDARY:
                continue
            table = spaces.facet_tables(element, lf, degree)
            values = np.einsum('b,bpi->pi', volume[element], table.values)
            traces.append(values.dot(table.normal))
        jump = traces[0] - traces[1] if len(traces) == 2 else traces[0]
        full += table.weights.dot(jump ** 2)
        legendre = fs.facet_polynomials(mesh.facet_length[facet],
                                        spaces.k - 1, table.t)
        projected += np.sum(((legendre * table.weights).dot(jump)) ** 2)
    return np.sqrt(full), np.sqrt(projected)


def _tangential_jumps(spaces, volume, facet_coefficients):
    total = 0.
    for element in range(spaces.mesh.n_elements):
        for lf in range(3):
            table = spaces.facet_tables(element, lf)
            trace = np.einsum('b,bpi,i->p', volume[element], table.values,
                              table.tangent)
            jump = fs.facet_project(spaces.projection, table.facet, trace) \
                - facet_coefficients[element, lf]
            total += jump.dot(jump) / spaces.mesh.element_height(element, lf)
    return np.sqrt(total)


def compute_errors(solution, case, degree=None):
    '''
    Errors of a discrete solution against a manufactured case.

    Args:
      solution: a Solution.
      case: a ManufacturedCase.
      degree: quadrature exactness, 2 max(k, 7) by default.

    Returns:
      an ErrorReport.
    '''
    spaces = solution.spaces
    degree = error_degree(spaces.k) if degree is None else degree
    volume = solution.volume
    pressure = solution.pressure_local
    sums = np.zeros(4)
    for element in range(spaces.mesh.n_elements):
        table = spaces.element_tables(element, degree)
        u_h = np.einsum('b,bpi->pi', volume[element], table.values)
        grad_h = np.einsum('b,bpij->pij', volume[element], table.gradients)
        div_h = volume[element].dot(table.divergences)
        p_h = pressure[element].dot(table.pressure)
        w = table.weights
        sums += [w.dot(np.sum((case.velocity(table.points) - u_h) ** 2,
                              axis=1)),
                 w.dot(np.sum((case.velocity_gradient(table.points)
                               - grad_h) ** 2, axis=(1, 2))),
                 w.dot((case.pressure(table.points) - p_h) ** 2),
                 w.dot(div_h ** 2)]
    l2_u, h1_u, l2_p, div = np.sqrt(sums)
    jump_n, jump_proj = _normal_jumps(spaces, volume, degree)
    jump_t = _tangential_jumps(spaces, volume, solution.facet)
    counts = solution.counts
    return ErrorReport(l2_u, h1_u, float(np.hypot(h1_u, jump_t)), l2_p, div,
                       jump_n, jump_proj, jump_t, counts.dofs, counts.gdofs,
                       counts.nze)


def discrete_norm(solution, other=None):
    '''
    The discrete H1-like norm of a velocity, or of the difference of two
    velocities living on the same mesh and order (the spaces may differ in
    mode or reduction).
    '''
    spaces = solution.spaces
    volume = solution.volume
    facet = solution.facet
    if other is not None:
        volume = volume - other.volume
        facet = facet - other.facet
    total = 0.
    for element in range(spaces.mesh.n_elements):
        norm = asm.local_matrices(spaces, element).norm
        vector = np.concatenate([volume[element], facet[element].ravel()])
        total += vector.dot(norm.dot(vector))
    return float(np.sqrt(max(total, 0.)))


def refinement_sequence(levels, n0=2):
    ''' Uniformly refined unit square meshes, the first with n0 x n0 cells. '''
    assert levels >= 1, "levels must be >= 1, got {0}".format(levels)
    meshes = [msh.unit_square_mesh(n0)]
    for _ in range(levels - 1):
        meshes.append(msh.refine(meshes[-1]))
    return meshes


def convergence_rates(rows, fields=RATE_FIELDS):
    ''' log2 rates of the error fields between consecutive rows. '''
    rates = [None]
    for previous, current in zip(rows[:-1], rows[1:]):
        ratio = np.log(previous.h / current.h)
        entry = {}
        for field in fields:
            coarse = getattr(previous.report, field)
            fine = getattr(current.report, field)
            entry[field] = float(np.log(coarse / fine) / ratio) \
                if coarse > 0 and fine > 0 else float('nan')
        rates.append(entry)
    return rates


def _map_ordered(function, items, num_threads):
    if num_threads <= 1:
        return [function(item) for item in items]
    with concurrent.futures.ThreadPoolExecutor(num_threads) as pool:
        return list(pool.map(function, items))


def convergence_study(k, mode=fs.RELAXED, variant=sv.PR,
                      with_reconstruction=False, levels=4, nu=1., n0=2,
                      lam=asm.DEFAULT_LAMBDA, reduced=False,
                      projected_jumps=True, num_threads=1):
    '''
    Solves the manufactured problem on a sequence of uniform refinements.

    Args:
      k: polynomial order.
      mode: FULL or RELAXED.
      variant: BASIC or PR.
      with_reconstruction: report errors of the reconstructed velocity.
      levels: number of meshes, >= 3.
      nu: viscosity.
      n0: subdivisions of the coarsest mesh.
      lam: stabilization parameter.
      reduced, projected_jumps: space options.
      num_threads: number of levels solved concurrently.

    Returns:
      a ConvergenceTable, rows in level order.
    '''
    assert levels >= 3, "A convergence study needs >= 3 levels, got " \
        "{0}".format(levels)
    sv.check_variant(mode, variant)
    case = manufactured_case(2, nu)
    configuration = sv.SolverConfiguration(mode, reduced, projected_jumps, lam)
    meshes = refinement_sequence(levels, n0)

    def run(level):
        mesh = meshes[level]
        discretization = sv.discretize(mesh, k, nu, case.force, configuration)
        solution = sv.solve_discretization(discretization, variant)
        if with_reconstruction:
            solution = sv.reconstruct_solution(solution,
                                               discretization.reconstruction)
        report = compute_errors(solution, case)
        _LOGGER.info("level %d (h=%.4e, %d elements): h1 error %.6e", level,
                     mesh.h_max, mesh.n_elements, report.h1_velocity)
        return ConvergenceRow(level, mesh.h_max, mesh.n_elements, report)

    rows = _map_ordered(run, range(levels), num_threads)
    return ConvergenceTable(k, mode, variant, with_reconstruction, nu, rows,
                            convergence_rates(rows))


def nu_sweep(k, mesh_n, nus, lam=asm.DEFAULT_LAMBDA, num_threads=1):
    '''
    Velocity errors of the basic and the pressure robust discretization on a
    fixed mesh for a list of viscosities.

    Returns:
      a list of NuSweepRow in the order of nus.
    '''
    mesh = msh.unit_square_mesh(mesh_n)

    def run(nu):
        case = manufactured_case(2, nu)
        discretization = sv.discretize(mesh, k, nu, case.force,
                                       sv.DEFAULT_CONFIGURATION._replace(
                                           lam=lam))
        basic = compute_errors(sv.solve_discretization(discretization,
                                                       sv.BASIC), case)
        robust = compute_errors(sv.solve_discretization(discretization,
                                                        sv.PR), case)
        _LOGGER.info("nu=%.1e: h1 basic %.6e, pr %.6e", nu,
                     basic.h1_velocity, robust.h1_velocity)
        return NuSweepRow(nu, basic.h1_velocity, robust.h1_velocity,
                          basic.l2_velocity, robust.l2_velocity)

    return _map_ordered(run, list(nus), num_threads)


def count_costs(mesh, k, mode=fs.RELAXED, projected_jumps=True, reduced=False,
                lam=asm.DEFAULT_LAMBDA):
    '''
    Counts (dofs, gdofs, nze) of a discretization without solving it.

    Returns:
      a CostCounts.
    '''
    spaces = fs.build_spaces(mesh, k, mode, reduced, projected_jumps)
    system = asm.assemble_system(spaces, 1., None, lam)
    return cd.condense(system).counts
