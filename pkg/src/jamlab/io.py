"""Plain-text dumps: edge lists, positions, household partitions, exploration traces.

All files are UTF-8 with LF line endings. Edge lists have one ``u v`` pair
per line (0-based, ``u < v``); every CSV starts with a header row.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .core import Graph


def _write(path, lines) -> None:
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8", newline="\n")


def write_edgelist(graph: Graph, path) -> None:
    _write(path, (f"{u} {v}" for u, v in graph.edges()))


def read_edgelist(path, n: int) -> Graph:
    text = Path(path).read_text(encoding="utf-8").split()
    edges = np.array(text, dtype=np.int64).reshape(-1, 2)
    return Graph.from_edges(n, edges)


def write_positions(graph: Graph, path) -> None:
    if graph.positions is None:
        raise ValueError("graph carries no positions")
    d = graph.positions.shape[1]
    header = ",".join(f"x{k}" for k in range(d))
    _write(path, [header, *(",".join(repr(float(x)) for x in row) for row in graph.positions)])


def read_positions(path) -> np.ndarray:
    return np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)


def write_households(partition, path) -> None:
    _write(path, ["vertex,household_id",
                  *(f"{v},{h}" for v, h in enumerate(partition.assignment))])


def write_trace(trace: np.ndarray, path) -> None:
    _write(path, ["t,X,Y", *(f"{t},{x},{y}" for t, x, y in trace)])
