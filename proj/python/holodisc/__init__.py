"""Pseudoholomorphic discs, wedge families and boundary limits."""

import json

from ._holodisc import (
    HolodiscError,
    cauchy_green,
    commands,
    dbar,
    flat_family,
    grid_nodes,
    holder_check,
    ray_summary,
    schwarz,
    solve_disc,
)
from ._holodisc import run as _run

__all__ = [
    "HolodiscError",
    "cauchy_green",
    "commands",
    "dbar",
    "flat_family",
    "grid_nodes",
    "holder_check",
    "ray_summary",
    "run",
    "schwarz",
    "solve_disc",
]


def run(command, **values):
    """Runs a scenario; keyword names use underscores for dashes."""
    cfg = {k.replace("_", "-"): str(v) for k, v in values.items()}
    return json.loads(_run(command, cfg))
