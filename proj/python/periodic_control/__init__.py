"""Periodic open/close epidemic control: schedules, costs, CFR fitting."""

import json

from . import _core
from ._core import (
    DataError,
    InvalidParameters,
    average_rt,
    cfr_from_params,
    default_gamma,
    phase_lengths,
    predict_deaths,
    simulate_custom,
)

__all__ = [
    "DataError",
    "InvalidParameters",
    "average_rt",
    "cfr_from_params",
    "compare_costs",
    "default_gamma",
    "fit_cfr",
    "fit_country_cfr",
    "ingest",
    "phase_lengths",
    "predict_deaths",
    "schedule",
    "simulate",
    "simulate_custom",
    "validate",
]


def schedule(**params):
    return json.loads(_core.schedule_json(**params))


def simulate(order="OC-then-CO", step=1.0, **params):
    return json.loads(_core.simulate_json(order, step, **params))


def compare_costs(**params):
    return json.loads(_core.compare_costs_json(**params))


def fit_cfr(start, new_cases, deaths, k_min=0, k_max=15, min_points=60):
    return json.loads(_core.fit_cfr_json(start, list(new_cases), list(deaths), k_min, k_max, min_points))


def fit_country_cfr(data_dir, country="Israel", from_date="2020-06-01", to_date="2020-12-29", k_min=0, k_max=15):
    return json.loads(_core.country_fit_cfr_json(str(data_dir), country, from_date, to_date, k_min, k_max))


def ingest(data_dir, country="Israel"):
    return json.loads(_core.ingest_json(str(data_dir), country))


def validate(data_dir, country="Israel", cfr=None):
    return json.loads(_core.validate_json(str(data_dir), country, cfr))
