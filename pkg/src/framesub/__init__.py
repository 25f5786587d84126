"""Frame subsampling with spectral barriers, random draws and least-squares recovery."""

from .bss import BssConfig, BssRun, bss_subsample, gamma, kappa, run_bss
from .errors import (
    BarrierViolationError,
    CapabilityError,
    FramesubError,
    InternalInvariantError,
    InvalidConfigError,
    InvalidInputError,
    InvalidModelError,
    RankError,
    SelectionFailureError,
)
from .fourier import (
    FrequencyIndexSet,
    equispaced_grid,
    fourier_frame,
    full_grid,
    hyperbolic_cross,
    random_frequencies,
    random_nodes,
)
from .frames import FrameBounds, WeightedSubframe, frame_bounds, weighted_frame_bounds
from .precondition import extend_with_blocks, orthonormalize_columns, zero_pad
from .strategies import (
    PlainBssPlan,
    RandomDrawConfig,
    bss_perp,
    plain_bss,
    plan_plain_bss,
    random_unweighted_subsample,
    random_weighted_subsample,
    two_step_unitnorm,
    unweighted_lower_certificate,
)

__version__ = "0.1.0"
