"""Optimal dividends with liquidation in a two-regime surplus model.

Parameters are plain dicts keyed mu1, mu2, sigma1, sigma2, lambda1, lambda2,
theta1, theta2, rho; missing keys take the reference values. Policies are
dicts as printed by the command-line tool, e.g.
{"type": "barrier_regime2", "b2": 0.78}.
"""

import json

from . import _core
from ._core import RegdivError, Selection, quadratic_roots

__all__ = [
    "RegdivError",
    "Selection",
    "reference_params",
    "solve",
    "selection_dict",
    "verify",
    "candidate_value",
    "simulate",
    "sweep",
    "reproduce_table",
    "figure_data",
    "quadratic_roots",
    "quartic_roots",
    "case_a_threshold",
]


def _dump(obj):
    return json.dumps(obj if obj is not None else {})


def reference_params():
    return json.loads(_core.reference_params())


def solve(params=None, allow_equal_thetas=False, grid_points=0):
    """Select and certify the optimal policy; returns a Selection."""
    return _core.select_policy(_dump(params), allow_equal_thetas, grid_points)


def selection_dict(selection):
    return json.loads(selection.json())


def verify(params, policy, allow_equal_thetas=False):
    return json.loads(_core.verify_policy(_dump(params), _dump(policy), allow_equal_thetas))


def candidate_value(params, policy, x, regime, allow_equal_thetas=False):
    return _core.candidate_value(_dump(params), _dump(policy), x, regime, allow_equal_thetas)


def simulate(params, policy, x0, regime, **kwargs):
    return json.loads(_core.estimate_value(_dump(params), _dump(policy), x0, regime, **kwargs))


def sweep(params, parameter, values, cold=False, allow_equal_thetas=False):
    return json.loads(_core.sweep_parameter(_dump(params), parameter, list(values), cold, allow_equal_thetas))


def reproduce_table(table_id):
    return json.loads(_core.reproduce_table(table_id))


def figure_data(kind, params=None, **kwargs):
    return json.loads(_core.figure_data(kind, _dump(params), **kwargs))


def quartic_roots(params=None, backend="companion"):
    return list(_core.quartic_roots(_dump(params), backend))


def case_a_threshold(params=None):
    return _core.case_a_threshold(_dump(params))
