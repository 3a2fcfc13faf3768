"""Uniform random vectors with unit sum under linear and nonlinear constraints."""

__version__ = "0.1.0"

from .constraints import (
    ConstraintSet,
    LinearConstraint,
    PolynomialConstraint,
    bounds_constraints,
    check,
    expand_linear,
)
from .drs import BoundsSpec, drs_sample, drs_sample_batch
from .drsc import InducedSimplexFamily, compute_thetas, drsc_sample, drsc_sample_batch
from .gof import build_grid, chi2_test, incomplete_gamma_q
from .lp import LinearProgram, solve
from .sampling import Sampler, rejection_sample_batch
from .simplex_core import (
    RegularSubSimplex,
    make_rng,
    project_to_plane,
    rescale_inverse,
    rescale_to_standard,
    sample_flat_dirichlet,
)
from .tiling import audit, project_tiles, region_report, tile_simplex

__all__ = [
    "BoundsSpec",
    "ConstraintSet",
    "InducedSimplexFamily",
    "LinearConstraint",
    "LinearProgram",
    "PolynomialConstraint",
    "RegularSubSimplex",
    "Sampler",
    "audit",
    "bounds_constraints",
    "build_grid",
    "check",
    "chi2_test",
    "compute_thetas",
    "drs_sample",
    "drs_sample_batch",
    "drsc_sample",
    "drsc_sample_batch",
    "expand_linear",
    "incomplete_gamma_q",
    "make_rng",
    "project_tiles",
    "project_to_plane",
    "region_report",
    "rejection_sample_batch",
    "rescale_inverse",
    "rescale_to_standard",
    "sample_flat_dirichlet",
    "solve",
    "tile_simplex",
]
