"""Weighted analysis-l1 channel recovery with angular priors."""

import json

from . import _core
from ._core import (
    BoundReport,
    ConfigError,
    DegenerateBoundError,
    DimensionError,
    Error,
    FeasibilityError,
    Frame,
    Prior,
    PriorError,
    SolverResult,
    StatDimEstimate,
    WeightError,
    build_frame,
    bound_denominator,
    empirical_statdim,
    error_upper,
    estimate_prior,
    heuristic_weights,
    identity_frame,
    independent_prior,
    optimize_weights,
    q,
    solve,
    statdim_upper,
)

__version__ = "0.1.0"


def default_config():
    """The default experiment configuration as a dict."""
    return json.loads(_core.default_config_json())


def normalize_config(config=None):
    """Validate `config` (dict) and return it with every default filled in."""
    return json.loads(_core.normalize_config_json(json.dumps(config or {})))


def run_error_vs_pilots(config=None, threads=1, out=None):
    """Recovery error versus pilot count; one dict per (m, method).

    Writes the CSV outputs as well when `out` names a directory."""
    return _core.run_error_vs_pilots(json.dumps(config or {}), threads, str(out or ""))


def run_bound_validation(config=None, threads=1):
    """Bound against the empirical statistical dimension, one dict per method."""
    return _core.run_bound_validation(json.dumps(config or {}), threads)
