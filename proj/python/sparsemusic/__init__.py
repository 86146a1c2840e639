"""MUSIC imaging, compressed-sensing analysis and sparse solvers (C++ core)."""

import json as _json

from . import _core
from ._core import (  # noqa: F401
    DomainError,
    bpdn,
    bpdn_constants,
    delta_margin,
    farfield_fourier_pair,
    gamma_exact,
    gamma_lower_bound,
    grid_points,
    music,
    mutual_coherence,
    noise_space,
    nsr_bound,
    omp,
    perturbation_check,
    ric_bruteforce,
    ric_coherence_bound,
    rho_star,
    spectral_estimate,
    stability_budget,
    tone_matrix,
)


def _cfg(config):
    if config is None:
        return ""
    return config if isinstance(config, str) else _json.dumps(config)


def simulate(config=None, seed=1):
    """One harness instance; config is a dict in the experiment-config layout."""
    return _core.simulate(_cfg(config), seed)


def run_trial(config=None, seed=1):
    return _core.run_trial(_cfg(config), seed)


def success_curve(config, axis, values):
    return _core.success_curve(_cfg(config), axis, list(values))


def recoverable_sparsity(config, n_list, method="music"):
    return _core.recoverable_sparsity(_cfg(config), list(n_list), method)


def effective_config(config=None):
    return _core.effective_config(_cfg(config))
