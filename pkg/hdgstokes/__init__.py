#
# hdgstokes/__init__.py
#
# Copyright (c) 2017 The hdgstokes developers
#
# This software is released under the MIT License.
#
# http://opensource.org/licenses/mit-license.php
#
"""
Relaxed H(div)-conforming hybrid discontinuous Galerkin methods for the
Stokes problem, with the averaging reconstruction that makes them pressure
robust.
"""

from .polyquad import jacobi_eval
from .polyquad import integrated_jacobi_eval
from .polyquad import simplex_quadrature
from .mesh import Mesh
from .mesh import unit_square_mesh
from .mesh import refine
from .mesh import element_map
from .mesh import check_mesh
from .refbasis import build_reference_basis
from .refbasis import eval_basis
from .refbasis import check_normal_orthogonality
from .refbasis import check_highest_order_volume_orthogonality
from .fespace import FULL
from .fespace import RELAXED
from .fespace import build_dof_map
from .fespace import build_spaces
from .fespace import piola_map
from .fespace import sign_fix
from .fespace import facet_project
from .assembly import assemble_A
from .assembly import assemble_B
from .assembly import assemble_rhs_basic
from .assembly import assemble_rhs_pr
from .assembly import assemble_system
from .assembly import build_reconstruction
from .assembly import bdm_interpolate
from .condense import condense as condense_system
from .solve import BASIC
from .solve import PR
from .solve import solve_basic
from .solve import solve_pr
from .solve import reconstruct_solution
from .solve import reduced_space_mode
from .analysis import manufactured_case
from .analysis import compute_errors
from .analysis import convergence_study
from .analysis import nu_sweep
from .analysis import count_costs
from .result import print_summary
