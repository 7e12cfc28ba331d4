"""Gaussian simulator for light-to-atoms coherent-state cloning."""

import json as _json

from ._core import (
    DomainError,
    GaussianState,
    InvariantViolation,
    SymplecticOp,
    apply,
    beam_splitter,
    coherent,
    compose,
    fidelity_with_coherent,
    homodyne,
    inverse,
    is_symplectic,
    phase_rotation,
    qnd_pp,
    qnd_xp,
    squeeze_prep_kappa,
    squeezed_vacuum,
    squeezer,
    tensor,
    vacuum,
)
from . import _core

__version__ = "0.1.0"


def run_protocol(protocol, **kwargs):
    """Run one protocol and return its report as a dict."""
    return _json.loads(_core.run_protocol_json(protocol, **kwargs))


def sweep(parameter, values, protocol, **kwargs):
    """One report dict per value of `parameter` ("V", "kappa" or "gain")."""
    return _json.loads(_core.sweep_json(parameter, list(values), protocol, **kwargs))


def montecarlo(protocol, *, trials, seed=0, **kwargs):
    """Sampled-outcome ensemble summary."""
    kwargs.setdefault("outcome", "sampled")
    return _json.loads(_core.montecarlo_json(protocol, trials=trials, seed=seed, **kwargs))


def feasibility(params, margin=10.0):
    """Spontaneous-emission check; `params` uses the CLI parameter-file keys."""
    return _json.loads(_core.feasibility_json(_json.dumps(params), margin))
