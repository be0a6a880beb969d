"""Trimmed one-dimensional and sliced Wasserstein distances between samples,
with finite-sample, bootstrap and hybrid confidence intervals, and
likelihood-free confidence sets for simulator parameters."""

from .bands import DKW, RELVC, BandSpec, band_dkw, band_relvc, beta_dkw, nu_relvc
from .errors import (
    A1Violated,
    DimensionMismatch,
    EmptySample,
    InvalidParams,
    InvalidSpec,
    InvalidTrim,
    NoOracle,
    NuTooLarge,
    SimulatorFailure,
    SwinferError,
    TooFewPoints,
    WrongFamily,
)
from .functionals import (
    DistSpec,
    c_r_delta,
    j_functional_1d,
    normal_spec,
    point_mass_spec,
    sliced_sj,
    split_uniform_spec,
    uniform_spec,
)
from .intervals import Envelope, Interval, check_a1, ci_1d, ci_sliced, envelope_1d
from .lfi import LfiResult, ParamGrid, lfi_confidence_set, sw_projection_estimate
from .models import (
    ModelId,
    PairOracle,
    lemma_c2_bounds,
    sample_pair,
    sample_torus,
    toggle_switch,
    true_sw_oracle,
)
from .resampling import BootstrapConfig, bootstrap_ci, hybrid_ci, min_spacing
from .transport import (
    DirectionSet,
    Sample,
    SortedProjection,
    TrimOrder,
    empirical_quantile,
    project,
    sample_directions,
    sliced_wasserstein,
    wasserstein_1d,
    wasserstein_inf_1d,
)

__version__ = "0.1.0"

__all__ = [
    "A1Violated", "BandSpec", "BootstrapConfig", "DKW", "DimensionMismatch",
    "DirectionSet", "DistSpec", "EmptySample", "Envelope", "Interval",
    "InvalidParams", "InvalidSpec", "InvalidTrim", "LfiResult", "ModelId",
    "NoOracle", "NuTooLarge", "PairOracle", "ParamGrid", "RELVC", "Sample",
    "SimulatorFailure", "SortedProjection", "SwinferError", "TooFewPoints",
    "TrimOrder", "WrongFamily", "band_dkw", "band_relvc", "beta_dkw",
    "bootstrap_ci", "c_r_delta", "check_a1", "ci_1d", "ci_sliced",
    "empirical_quantile", "envelope_1d", "hybrid_ci", "j_functional_1d",
    "lemma_c2_bounds", "lfi_confidence_set", "min_spacing", "normal_spec",
    "nu_relvc", "point_mass_spec", "project", "sample_directions",
    "sample_pair", "sample_torus", "sliced_sj", "sliced_wasserstein",
    "split_uniform_spec", "sw_projection_estimate", "toggle_switch",
    "true_sw_oracle", "uniform_spec", "wasserstein_1d", "wasserstein_inf_1d",
]
