"""Debate evaluation with argumentation semantics and graph networks."""

import json as _json

from ._arbiter import *  # noqa: F401,F403
from ._arbiter import run_experiment as _run_experiment


def run_experiment(config_text):
    """Run an experiment from `key = value` config text and return the report as a dict."""
    return _json.loads(_run_experiment(config_text))
