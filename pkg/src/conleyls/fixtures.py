"""Named regression systems.

Each fixture is a plain config dict in the CLI's ``system`` format.
Step sizes are chosen so that one step moves a cell farther than its own
width away from the rest points; otherwise every cell maps to itself.
"""
from __future__ import annotations

import copy
import random

FIXTURES = {
    "saddle": {
        "field": ["x1", "-x2"],
        "grid": {"box": [[-1, 1], [-1, 1]], "subdivisions": [16, 16], "periodic": [False, False]},
        "tau": 1.0,
        "padding": 0.01,
    },
    "attractor": {
        "field": ["-x1", "-x2"],
        "grid": {"box": [[-1, 1], [-1, 1]], "subdivisions": [16, 16], "periodic": [False, False]},
        "tau": 1.0,
        "padding": 0.01,
    },
    "circle": {
        "field": ["-sin(2*pi*x1)"],
        "grid": {"box": [[0, 1]], "subdivisions": [16], "periodic": [True]},
        "tau": 0.2,
        "padding": 0.00625,
    },
    "torus": {
        "field": ["2*pi*sin(2*pi*x1)", "2*pi*sin(2*pi*x2)"],
        "grid": {"box": [[0, 1], [0, 1]], "subdivisions": [16, 16], "periodic": [True, True]},
        "tau": 0.05,
        "padding": 0.00625,
    },
    "line4": {
        "map": {
            "cells": [4],
            "periodic": [False],
            "images": {"0": [[0]], "1": [[0], [1]], "2": [[1], [3]], "3": ["exterior"]},
        },
    },
    "circle8": {
        "field": ["-sin(2*pi*x1)"],
        "grid": {"box": [[0, 1]], "subdivisions": [8], "periodic": [True]},
        "tau": 0.2,
        "padding": 0.0125,
    },
}


def fixture(name: str) -> dict:
    try:
        return copy.deepcopy(FIXTURES[name])
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; choose from {sorted(FIXTURES)}") from None


def tiny_system(seed: int, kind: str = "circle") -> dict:
    """Seeded gradient systems small enough for the brute-force oracle.

    ``circle`` has 10 to 14 cells and one or two wells; ``torus`` is a
    periodic grid of 3 by 4 cells in either orientation.
    """
    rng = random.Random(seed)
    if kind == "circle":
        n = rng.randint(10, 14)
        m = rng.choice([1, 2])
        ph = round(rng.uniform(0, 1), 3)
        return {
            "field": [f"-sin(2*pi*({m}*x1+{ph}))"],
            "grid": {"box": [[0, 1]], "subdivisions": [n], "periodic": [True]},
            "tau": 0.3 / m,
            "padding": round(0.125 / n, 6),
        }
    if kind == "torus":
        shape = rng.choice([[3, 4], [4, 3]])
        return {
            "field": ["2*pi*sin(2*pi*x1)", "2*pi*sin(2*pi*x2)"],
            "grid": {"box": [[0, 1], [0, 1]], "subdivisions": shape, "periodic": [True, True]},
            "tau": 0.05,
            "padding": 0.01,
        }
    raise ValueError(f"unknown tiny system kind {kind!r}")
