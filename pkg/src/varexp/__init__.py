"""Variable-exponent modulars, Bergman-type projections and modular-inequality falsification."""

__version__ = "0.1.0"

from .domains import (
    Annulus,
    Box,
    DiskSet,
    Domain,
    QuadratureGrid,
    Union,
    build_grid,
    measure,
    neighborhood_halfplane,
)
from .exponents import (
    Constant,
    ExponentField,
    GridSampled,
    Radial,
    TwoLevel,
    essential_bounds,
    eval_exponent,
    find_gap_sets,
    log_holder_modulus,
)
from .falsifier import FalsificationReport, contradiction_scale, falsify, proof_chain_check
from .modular import Indicator, PointwiseTable, Polynomial, ScaledIndicator, luxemburg_norm, modular
from .operators import (
    BergmanDisk,
    BergmanHalfPlane,
    HarmonicHalfSpace,
    harmonicity_residual,
    holomorphy_residual,
    kernel,
    project,
    project_many,
)
from .verifier import LemmaReport, halfplane_negativity_check, kernel_infimum, verify_lower_bound
