"""Photon statistics of propagating microwave fields.

Thin layer over the compiled core; configs and results travel as JSON.
"""

import json

from . import _core
from ._core import (
    ConfigError,
    NumericalError,
    accumulated_phase,
    amplify,
    analytic_moments,
    bose_einstein,
    compression_power_dbm,
    critical_photons,
    dephasing_rate,
    dispersive_shift,
    effective_temperature,
    experiment_names,
    g2_unnormalized,
    jpa_polynomial,
    photon_variance,
    purcell_rate,
    schema_names,
    symmetrized_moments,
    wigner_gaussian_contour,
)

__version__ = _core.version()


def default_config():
    return json.loads(_core.default_config_json())


def schema(name):
    text = _core.schema_text(name)
    if text is None:
        raise KeyError(name)
    return json.loads(text)


def run_experiment(experiment, **overrides):
    """Runs an experiment in memory. Returns (results, {file name: bytes})."""
    config = {"experiment": experiment}
    for section, values in overrides.items():
        config[section] = values
    results, files = _core.run_experiment_json(json.dumps(config))
    return json.loads(results), files


def report(run_dir):
    return json.loads(_core.report_json(str(run_dir)))
