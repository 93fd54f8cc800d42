"""Python bindings for the tempo planner.

Schedules cross the boundary as JSON documents in the CLI's format.
"""

import json

from ._core import (
    ConfigurationError,
    ParseError,
    algorithms,
    fixture_names,
    gantt,
    scene_json,
    validate,
)
from ._core import solve as _solve

__all__ = [
    "ConfigurationError",
    "ParseError",
    "algorithms",
    "fixture_names",
    "gantt",
    "scene_json",
    "solve",
    "validate",
]


def solve(task="problem1", algorithm="lazy", budget=5.0, seed=0, scene=None, episodes=3, optimal=False):
    """Solve a built-in task (or a scene dict) and return the result as a dict.

    The "schedule" entry holds the parsed schedule document, "schedule_json"
    the raw text accepted by validate().
    """
    text = json.dumps(scene) if scene is not None else ""
    out = _solve(task, algorithm, budget, seed, text, episodes, optimal)
    out["schedule_json"] = out["schedule"]
    if out["schedule"] is not None:
        out["schedule"] = json.loads(out["schedule"])
    return out
