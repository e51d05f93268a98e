"""Sub-linear expectation numerics.

The compiled extension carries the implementation; this package re-exports it
and adds small conveniences for building generator-set specifications.
"""

import json as _json

try:
    from sublin._core import *  # noqa: F401,F403
    from sublin._core import __version__  # noqa: F401
except ImportError:  # development tree: extension on PYTHONPATH, not installed
    from _core import *  # noqa: F401,F403
    from _core import __version__  # noqa: F401


def generator_set(*measures, label=""):
    """Serialize measures (dicts with a 'kind' tag) into a generator-set spec."""
    return _json.dumps({"label": label, "measures": list(measures)})


def normal(mean=0.0, sd=1.0):
    return {"kind": "normal", "mean": mean, "sd": sd}


def pareto(alpha, xmin=1.0, sign="positive"):
    return {"kind": "pareto", "alpha": alpha, "xmin": xmin, "sign": sign}


def discrete(support):
    return {"kind": "discrete", "support": [[v, p] for v, p in support]}


def coefficients(kind="identity", **kwargs):
    return _json.dumps({"kind": kind, **kwargs})
