"""Python front end for the pellip C++ core."""

import json as _json

from ._core import *  # noqa: F401,F403
from ._core import PellipError, run_experiment as _run_experiment


def run(config=None, write=False):
    """Run an experiment from a dict (or JSON text) and return the summary as a dict."""
    if config is None:
        config = {}
    text = config if isinstance(config, str) else _json.dumps(config)
    return _json.loads(_run_experiment(text, write))


__all__ = ["run", "PellipError"]
