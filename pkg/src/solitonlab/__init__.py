"""Stochastic KdV soliton laboratory.

Direct lab-frame integration of the stochastically forced KdV equation,
the frozen-frame modulation solver (perturbation + amplitude/phase pair),
the order-0/1/2 approximation hierarchy with closed-form statistics, and
seeded Monte Carlo ensemble tooling.
"""

from .approx import ApproxSimulator, ConstantsTable, constants_table, theory_curves
from .direct import DirectStepper
from .ensemble import EnsembleSummary, RunConfig, pathwise_correspondence, run_ensemble
from .exceptions import (
    BlowUpError,
    DomainError,
    FrameCollapseError,
    NoConvergenceError,
    SingularProjectionError,
)
from .frozen import FrozenStepper
from .grid import SpatialGrid, weighted_norm
from .noise import NoiseSpec, make_generator, rescale_field, rescale_noise, sample_block
from .phasefit import PhaseFit, fit_phase, fit_series, phase_shift
from .soliton import SolitonContext, soliton_profile, zeta_profile
from .stats import OrderFit, StreamingMoments, fit_order

__version__ = "0.1.0"

__all__ = [
    "ApproxSimulator",
    "BlowUpError",
    "ConstantsTable",
    "DirectStepper",
    "DomainError",
    "EnsembleSummary",
    "FrameCollapseError",
    "FrozenStepper",
    "NoConvergenceError",
    "NoiseSpec",
    "OrderFit",
    "PhaseFit",
    "RunConfig",
    "SingularProjectionError",
    "SolitonContext",
    "SpatialGrid",
    "StreamingMoments",
    "constants_table",
    "fit_order",
    "fit_phase",
    "fit_series",
    "make_generator",
    "pathwise_correspondence",
    "phase_shift",
    "rescale_field",
    "rescale_noise",
    "run_ensemble",
    "sample_block",
    "soliton_profile",
    "theory_curves",
    "weighted_norm",
    "zeta_profile",
]
