"""A small corpus of torus actions used by the tests and the acceptance suite."""

from __future__ import annotations

from .action import TorusAction

_SPECS = {
    "line": (1, [[0], [1]]),
    "p2_line": (1, [[0], [1], [2]]),
    "p3_line": (1, [[0], [1], [2], [3]]),
    "repeated": (1, [[0], [0], [1], [3]]),
    "square": (2, [[0, 0], [1, 0], [0, 1], [1, 1]]),
    "triangle": (2, [[0, 0], [1, 0], [0, 1]]),
    "hex": (2, [[0, 0], [1, 0], [0, 1], [1, 1], [2, 1]]),
    "tri5": (2, [[0, 0], [2, 0], [0, 2], [1, 1], [1, 0]]),
    "pent": (2, [[0, 0], [2, 0], [0, 2], [1, 1], [2, 2]]),
    "kernel": (2, [[0, 0], [1, 1], [2, 2]]),
    "isotypic": (2, [[0, 0], [0, 0], [1, 0], [0, 1], [1, 1]]),
}


def corpus() -> dict[str, TorusAction]:
    out = {name: TorusAction(rank, tuple(map(tuple, ws)), name) for name, (rank, ws) in _SPECS.items()}
    out["shifted_square"] = TorusAction(2, out["square"].weights, "shifted_square", (3, -2))
    return out
