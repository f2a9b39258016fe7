"""Likelihood-free inference with populations of tempered chains.

Three samplers over pluggable generative models: standard rejection,
single-chain Markov sampling with a distance-indicator acceptance, and a
population of chains at increasing tolerances/temperatures mixed by
likelihood-free exchange moves (optionally restricted to distance rings).
"""

__version__ = "0.1.0"

from .config import PtConfig
from .diagnostics import (acceptance_table, autocorrelation, density_export,
                          exchange_matrix, posterior_summary, thin)
from .estimators import McmcSampler, PtSampler, RejectionSampler
from .model import ChainState, ModelBinding, validate_model_binding
from .rng import RngStream, rng_streams
from .samplers import (RejectionCapError, abc_mcmc_run, abc_mcmc_step,
                       abc_rejection, pt_exchange_attempt,
                       pt_exchange_phase_rings, pt_exchange_phase_uniform,
                       pt_initialize, run_abc_pt)
from .schedules import log_spaced_schedule, ring_index, ring_partition
from .tb import TbModel
from .toy import ToyModel
from .trace import Trace

__all__ = [
    "__version__",
    "PtConfig",
    "Trace",
    "ModelBinding",
    "ChainState",
    "RngStream",
    "rng_streams",
    "ToyModel",
    "TbModel",
    "RejectionSampler",
    "McmcSampler",
    "PtSampler",
    "RejectionCapError",
    "abc_rejection",
    "abc_mcmc_step",
    "abc_mcmc_run",
    "pt_initialize",
    "pt_exchange_attempt",
    "pt_exchange_phase_uniform",
    "pt_exchange_phase_rings",
    "run_abc_pt",
    "log_spaced_schedule",
    "ring_partition",
    "ring_index",
    "autocorrelation",
    "thin",
    "acceptance_table",
    "exchange_matrix",
    "posterior_summary",
    "density_export",
    "validate_model_binding",
]
