"""Python front end for the blurreg C++ core.

Sequences are lists of integer numerators over 256.
"""

import json

from ._core import (
    RegimeError,
    ValidationError,
    baseline,
    difference_sequence,
    normal_cdf,
    nu_threshold,
    sample_sequence,
)
from . import _core

__all__ = [
    "RegimeError",
    "ValidationError",
    "align",
    "baseline",
    "difference_sequence",
    "normal_cdf",
    "nu_threshold",
    "reproduce",
    "run",
    "sample_sequence",
]


def align(d1, d2, v="1/256"):
    """Longest-path alignment of two difference sequences at threshold v."""
    return json.loads(_core.align_json(list(d1), list(d2), str(v)))


def run(config):
    """Full pipeline on a scenario given as a dict or JSON string."""
    text = config if isinstance(config, str) else json.dumps(config)
    return json.loads(_core.run_json(text))


def reproduce():
    return json.loads(_core.reproduce_json())
