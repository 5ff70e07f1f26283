"""Graded trigonometric R-matrices, difference operators and spin chains."""

import json

from ._gradedrm import *  # noqa: F401,F403
from ._gradedrm import _run_battery, default_battery_specs


def run_battery(specs=None, seed=7, samples=100, tolerance=None, hbar=None):
    """Runs the verification battery and returns the report as a dict."""
    if specs is None:
        specs = default_battery_specs()
    return json.loads(_run_battery(list(specs), seed, samples, tolerance, hbar))
