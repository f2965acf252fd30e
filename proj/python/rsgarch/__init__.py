"""Regime-switching BEKK-in-mean estimation."""

import json

from ._core import (
    EstimationError,
    InputError,
    NumericalError,
    fit as _fit,
    log_likelihood as _log_likelihood,
    simulate as _simulate,
    summary_stats,
)

__all__ = ["EstimationError", "InputError", "NumericalError", "fit", "log_likelihood", "simulate", "summary_stats"]


def _dump(params):
    return params if isinstance(params, str) else json.dumps(params)


def simulate(params, n, seed=0):
    """Returns (rm, rb, states); states is None for a single-regime model."""
    return _simulate(_dump(params), n, seed)


def fit(rm, rb, regimes=1, restricted=False, restarts=3, seed=0, std_errors=True):
    """Fits the model and returns the result document as a dict."""
    return json.loads(_fit(list(rm), list(rb), regimes, restricted, restarts, seed, std_errors))


def log_likelihood(rm, rb, params):
    return _log_likelihood(list(rm), list(rb), _dump(params))
