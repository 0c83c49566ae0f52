import numpy as np
import pytest

from jamlab import io as jio
from jamlab.core import Graph, Params
from jamlab.crg import sample_households
from jamlab.explore import explore_trace
from jamlab.rgg import sample_rgg
from jamlab.rng import RngStream


def test_edgelist_round_trip(tmp_path):
    g = sample_rgg(Params(500, 9, 0, 2), RngStream(1))
    path = tmp_path / "g.edges"
    jio.write_edgelist(g, path)
    text = path.read_text(encoding="utf-8")
    first = text.splitlines()[0].split()
    assert int(first[0]) < int(first[1])
    back = jio.read_edgelist(path, g.n)
    assert np.array_equal(back.indptr, g.indptr) and np.array_equal(back.indices, g.indices)


def test_empty_edgelist(tmp_path):
    jio.write_edgelist(Graph.empty(4), tmp_path / "e")
    assert jio.read_edgelist(tmp_path / "e", 4).num_edges == 0


def test_positions_round_trip_exact(tmp_path):
    g = sample_rgg(Params(200, 5, 0, 3), RngStream(2))
    jio.write_positions(g, tmp_path / "p.csv")
    assert (tmp_path / "p.csv").read_text().startswith("x0,x1,x2\n")
    assert np.array_equal(jio.read_positions(tmp_path / "p.csv"), g.positions)
    with pytest.raises(ValueError):
        jio.write_positions(Graph.empty(3), tmp_path / "q.csv")


def test_households_and_trace_csv(tmp_path):
    hp = sample_households(Params(100, 6, 0.5), RngStream(3))
    jio.write_households(hp, tmp_path / "h.csv")
    data = (tmp_path / "h.csv").read_bytes()
    assert b"\r" not in data and data.endswith(b"\n")
    rows = np.loadtxt(tmp_path / "h.csv", delimiter=",", skiprows=1, dtype=np.int64)
    assert np.array_equal(rows[:, 0], np.arange(100))
    assert np.array_equal(rows[:, 1], hp.assignment)

    tr = explore_trace(Params(100, 6, 0.5), RngStream(3))
    jio.write_trace(tr, tmp_path / "t.csv")
    assert (tmp_path / "t.csv").read_text().splitlines()[0] == "t,X,Y"
    assert np.array_equal(np.loadtxt(tmp_path / "t.csv", delimiter=",", skiprows=1, dtype=np.int64), tr)
