"""CWENO/CWENOZ finite-volume reconstructions with optimal global smoothness
indicators, plus a semidiscrete solver and benchmark experiment driver."""

from .cweno import (CWenoConfig, WeightSet, blend, compute_p0,
                    default_linear_weights, fixed_eps, nonlinear_weights,
                    power_of_dx, tau_preset, validate_parameters)
from .poly import (CellGeometry, Poly, StencilData, cell_1d, cell_2d,
                   cell_average, eval_poly, fit_constrained_ls)
from .recon1d import (Recon1DScheme, ScalarField1D, critical_point_study,
                      reconstruct_cell_1d, reconstruct_field_1d, scheme_1d)
from .recon2d import (Recon2DScheme, ScalarField2D, face_gauss_points,
                      fit_patch, reconstruct_cell_2d, scheme_2d)
from .smoothness import (SmoothnessSystem, bm_reference, build_system,
                         indicator, indicator_direct, moment_vector)

__version__ = "0.1.0"
