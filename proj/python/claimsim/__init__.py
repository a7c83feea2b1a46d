"""Python front end for the claimsim cluster-process simulator."""

import json

from . import _core
from ._core import (
    ClaimsimError,
    borel_pmf,
    integrated_survival,
    law,
    moment,
    positive_stable_laplace,
    quantile,
    summaries,
    survival,
)

__version__ = _core.version()


def analyze(config_text):
    return json.loads(_core.analyze(config_text))


def verify(config_text, threads=1, keep_raw=False):
    return json.loads(_core.verify(config_text, threads, keep_raw))


def config(config_text):
    """Parsed and normalised configuration as a dict."""
    return json.loads(_core.config_json(config_text))


__all__ = [
    "ClaimsimError",
    "analyze",
    "borel_pmf",
    "config",
    "integrated_survival",
    "law",
    "moment",
    "positive_stable_laplace",
    "quantile",
    "summaries",
    "survival",
    "verify",
]
