"""JSON spec files for balls and test sets.

Ball spec: {"young": [{"type": "power", "p": 2.0, "scale": 1.0},
                      {"type": "pieces", "points": [[0, 0], [0.5, 0], [1, 1]],
                       "interp": "linear"},
                      {"type": "pieces", "points": [[0, 0], [1, "inf"]]}]}
Set specs: {"corners": [[1.0, 0.2], [0.3, 1.0]]} for c-sets and
           {"xs": [0, 0.5], "heights": [1.0, 0.866]} for stair sets.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .sets import CSet, StairSet
from .young import OrliczBall, YoungFunction


def young_from_dict(d: dict) -> YoungFunction:
    kind = d.get("type")
    if kind == "power":
        return YoungFunction.power(float(d["p"]), float(d.get("scale", 1.0)))
    if kind == "pieces":
        interp = d.get("interp", "linear")
        if interp != "linear":
            raise ValueError(f"unsupported interpolation {interp!r}")
        pts = []
        for x, y in d["points"]:
            yy = math.inf if isinstance(y, str) and y.lower() in ("inf", "+inf") else float(y)
            pts.append((float(x), yy))
        return YoungFunction.piecewise_linear(pts)
    raise ValueError(f"unknown young function type {kind!r}")


def ball_from_dict(d: dict) -> OrliczBall:
    return OrliczBall([young_from_dict(y) for y in d["young"]])


def load_ball(path: str) -> OrliczBall:
    with open(path) as fh:
        return ball_from_dict(json.load(fh))


def load_set(path: str):
    with open(path) as fh:
        d = json.load(fh)
    if "corners" in d:
        return CSet(np.asarray(d["corners"], dtype=float))
    if "xs" in d:
        return StairSet(np.asarray(d["xs"], dtype=float),
                        np.asarray(d["heights"], dtype=float))
    raise ValueError("set spec needs 'corners' or 'xs'/'heights'")


def lp_ball(p: float, n: int) -> OrliczBall:
    return OrliczBall([YoungFunction.power(p)] * n)


def cube_ball(n: int, half_width: float = 1.0) -> OrliczBall:
    return OrliczBall([YoungFunction.flat_then_inf(half_width)] * n)
