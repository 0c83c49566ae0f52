import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jamlab.core import DomainError, Params
from jamlab.crg import sample_crg
from jamlab.explore import explore_jam
from jamlab.mc import (
    ModelSpec,
    Welford,
    clt_check,
    fold,
    jam_counts,
    run_replications,
    summarize,
)
from jamlab.meanfield import jamming_fraction, variance
from jamlab.rgg import sample_rgg
from jamlab.rng import RngStream
from jamlab.rsa import greedy_jam
from jamlab.special import alpha_d

A2 = alpha_d(2)


def test_single_replication():
    s = run_replications(ModelSpec("explore", Params(500, 10, A2)), 1, 3)
    assert s.reps == 1 and s.var == 0.0 and s.stderr == 0.0
    assert s.mean == s.jam_counts[0] / 500
    assert s.counts.sum() == 1


def test_spec_validation():
    with pytest.raises(DomainError):
        ModelSpec("lattice", Params(10, 1, 0))
    with pytest.raises(DomainError):
        ModelSpec("crg", Params(2, 10, 0))
    with pytest.raises(DomainError):
        run_replications(ModelSpec("explore", Params(10, 1, 0)), 0, 0)
    with pytest.raises(DomainError):
        run_replications(ModelSpec("explore", Params(10, 1, 0)), 5, -1)


@pytest.mark.parametrize("model, params", [
    ("rgg", Params(400, 10, 0, 2)),
    ("crg", Params(400, 10, A2)),
    ("explore", Params(400, 10, A2)),
])
def test_batch_matches_per_stream_api(model, params):
    counts = jam_counts(ModelSpec(model, params), 6, 17)
    for i, k in enumerate(counts):
        rng = RngStream(17, i)
        if model == "rgg":
            expected = greedy_jam(sample_rgg(params, rng), rng).jam_count
        elif model == "crg":
            expected = greedy_jam(sample_crg(params, rng), rng).jam_count
        else:
            expected = explore_jam(params, rng).jam_count
        assert k == expected


@pytest.mark.parametrize("model", ["rgg", "crg", "explore"])
def test_parallelism_does_not_change_output(model):
    spec = ModelSpec(model, Params(300, 8, 0.0 if model == "rgg" else A2, 2))
    outs = [run_replications(spec, 301, 5, par) for par in (1, 4, 8)]
    texts = [(o.to_json(), o.replications_csv()) for o in outs]
    assert texts[0] == texts[1] == texts[2]


def test_stderr_scales_with_reps():
    spec = ModelSpec("explore", Params(1000, 10, A2))
    small = run_replications(spec, 1000, 1).stderr
    large = run_replications(spec, 16_000, 2).stderr
    assert small / large == pytest.approx(4.0, rel=0.2)


@settings(max_examples=100)
@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=700))
def test_welford_fold_matches_numpy(xs):
    acc = fold(xs)
    assert acc.count == len(xs)
    assert acc.mean == pytest.approx(np.mean(xs), rel=1e-9, abs=1e-6)
    if len(xs) > 1:
        assert acc.var == pytest.approx(np.var(xs, ddof=1), rel=1e-8, abs=1e-4)


def test_welford_merge_associative():
    xs = np.random.default_rng(0).normal(size=1000)
    a, b = Welford(), Welford()
    for x in xs[:300]:
        a.add(x)
    for x in xs[300:]:
        b.add(x)
    m = a.merge(b)
    assert m.mean == pytest.approx(xs.mean(), rel=1e-12)
    assert m.var == pytest.approx(xs.var(ddof=1), rel=1e-12)
    assert Welford().merge(a).mean == a.mean


def test_summary_invariants_and_bins():
    counts = np.random.default_rng(1).integers(100, 200, 777)
    s = summarize(counts, 1000)
    assert s.var >= 0 and s.counts.sum() == 777
    assert s.stderr == pytest.approx(math.sqrt(s.var / 777))
    assert s.scaled_var == pytest.approx(1000 * s.var)
    assert summarize(counts, 1000, bins=12).counts.size == 12


def test_json_and_csv_outputs():
    s = run_replications(ModelSpec("explore", Params(200, 5, 0.5)), 50, 9, bins=5)
    d = json.loads(s.to_json())
    assert list(d) == ["reps", "mean", "var", "scaled_var", "stderr", "bins", "counts"]
    assert d["reps"] == 50 and len(d["bins"]) == 6 and sum(d["counts"]) == 50
    assert d["mean"] == pytest.approx(s.mean, rel=1e-8)
    lines = s.replications_csv().splitlines()
    assert lines[0] == "rep_index,jam_count,jam_fraction" and len(lines) == 51
    i, k, f = lines[8].split(",")
    assert int(i) == 7 and int(k) == s.jam_counts[7] and float(f) == pytest.approx(int(k) / 200)


def test_clt_check_degenerate():
    p = Params(300, 0, 0.5)
    s = run_replications(ModelSpec("explore", p), 50, 0)
    rep = clt_check(s, p, 1.0, 0.0)
    assert rep.zero_variance and s.mean == 1.0 and rep.z_score == 0.0
    assert math.isnan(rep.ks_statistic)


def test_clt_check_at_reference_point():
    p = Params(1000, 20, A2)
    s = run_replications(ModelSpec("explore", p), 2000, 0)
    j, v = jamming_fraction(p), variance(p)
    rep = clt_check(s, p, j, v)
    assert 0.8 <= rep.variance_ratio <= 1.2
    assert s.mean == pytest.approx(0.0786, abs=0.01)
    assert rep.variance_to_mean == pytest.approx(v / j)
    assert set(rep.to_dict()) >= {"z_score", "variance_ratio", "ks_statistic"}


def test_clt_ks_statistic():
    p = Params(1000, 10, A2)
    s = run_replications(ModelSpec("explore", p), 2000, 0)
    rep = clt_check(s, p, jamming_fraction(p), variance(p))
    assert rep.ks_statistic < rep.ks_critical_1pct


def test_finite_size_drift_towards_fluid_limit():
    # at c = 20 the finite-n excess over J* is far above the Monte Carlo noise
    p = Params(1, 20, A2)
    j = jamming_fraction(p)
    gaps = [abs(run_replications(ModelSpec("crg", Params(n, 20, A2)), 2000, 0).mean - j)
            for n in (500, 1000, 2000)]
    assert gaps[0] > gaps[1] > gaps[2]


def test_rgg_reference_point():
    s = run_replications(ModelSpec("rgg", Params(1000, 10, 0, 2)), 150, 0)
    assert s.mean == pytest.approx(0.1623, abs=0.01)


def test_lattice_ks_separates_normal_from_flat():
    from jamlab.mc import lattice_ks

    rng = np.random.default_rng(4)
    normalish = np.rint(rng.normal(100, 4, 5000))
    flat = rng.integers(90, 111, 5000)
    crit = 1.628 / math.sqrt(5000)
    assert lattice_ks(normalish) < crit
    assert lattice_ks(flat) > crit
