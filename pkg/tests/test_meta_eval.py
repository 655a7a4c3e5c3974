import csv
import io
import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mtmeta.data_model import ScoreMatrix
from mtmeta.errors import InsufficientDataError, InvalidInputError, InvalidMatrixError
from mtmeta.meta_eval import (
    ALL,
    WITHOUT_OUTLIERS,
    CorrelationTable,
    correlations_with_without_outliers,
    rank_metrics,
    rolling_window_curve,
    subsample_correlations,
    topn_curve,
    williams_test,
    write_curve_csv,
)
from oracles import pearson_oracle, williams_oracle


def matrix_of(per_metric, lower=()):
    scores = {(m, s): v for m, by_sys in per_metric.items() for s, v in by_sys.items()}
    return ScoreMatrix(scores, higher_is_better={m: m not in lower for m in per_metric})


def spread_da(n, seed=0):
    rng = np.random.default_rng(seed)
    return {f"sys{i:02d}": float(v) for i, v in enumerate(np.sort(rng.normal(0, 0.3, n)))}


# --------------------------------------------------------------------------
# correlation tables

def test_metric_equal_to_da_single_condition():
    da = spread_da(8)
    table = correlations_with_without_outliers(da, matrix_of({"m": da}))
    assert table.conditions == (ALL,)
    assert table.r[("m", ALL)] == pytest.approx(1.0, abs=1e-15)
    assert table.n_systems[("m", ALL)] == 8


def test_without_outliers_condition():
    da = {"a": 0.0, "b": 0.1, "c": 0.2, "d": 0.15, "e": -3.0, "f": 0.05}
    bleu = {"a": 20.0, "b": 21.0, "c": 25.0, "d": 22.0, "e": 5.0, "f": 19.0}
    ter = {s: 100 - v for s, v in bleu.items()}
    table = correlations_with_without_outliers(da, matrix_of({"BLEU": bleu, "TER": ter},
                                                             lower=("TER",)))
    assert table.outliers == {"e"}
    assert table.n_systems[("BLEU", WITHOUT_OUTLIERS)] == table.n_systems[("BLEU", ALL)] - 1
    kept = [s for s in sorted(da) if s != "e"]
    expected = pearson_oracle([da[s] for s in kept], [bleu[s] for s in kept])
    assert table.r[("BLEU", WITHOUT_OUTLIERS)] == pytest.approx(expected, abs=1e-12)
    # lower-is-better scores are negated, so TER agrees with BLEU in sign
    assert table.r[("TER", ALL)] == pytest.approx(table.r[("BLEU", ALL)], abs=1e-12)
    assert table.r[("TER", ALL)] > 0


def test_undefined_correlation_is_reported():
    da = spread_da(5)
    table = correlations_with_without_outliers(da, matrix_of({"flat": {s: 1.0 for s in da}}))
    assert table.r[("flat", ALL)] is None
    assert "undefined" in table.to_csv()


def test_too_few_shared_systems():
    da = spread_da(5)
    partial = dict(list(da.items())[:3])
    with pytest.raises(InsufficientDataError):
        correlations_with_without_outliers(da, matrix_of({"m": partial}))


def test_table_round_trips():
    da = {"a": 0.0, "b": 0.1, "c": 0.2, "d": 0.15, "e": -3.0}
    table = correlations_with_without_outliers(
        da, matrix_of({"m": {"a": 1, "b": 3, "c": 2, "d": 5, "e": 0}}), language_pair="en-de")
    assert CorrelationTable.from_dict(json.loads(json.dumps(table.to_dict()))) == table
    rows = list(csv.DictReader(io.StringIO(table.to_csv())))
    assert [(r["metric"], r["condition"]) for r in rows] == [("m", ALL), ("m", WITHOUT_OUTLIERS)]
    assert float(rows[0]["r"]) == table.r[("m", ALL)]


# --------------------------------------------------------------------------
# curves

def test_topn_identity_and_cardinality():
    da = spread_da(10)
    curve = topn_curve(da, da)
    assert [n for n, _ in curve] == list(range(10, 3, -1))
    assert all(r == pytest.approx(1.0, abs=1e-15) for _, r in curve)


def test_topn_constructed_fixture():
    # the four best systems are ranked backwards, the two worst are far below
    da = {"s1": -10.0, "s2": -9.0, "s3": 1.0, "s4": 2.0, "s5": 3.0, "s6": 4.0}
    metric = {"s1": -10.0, "s2": -9.0, "s3": 4.0, "s4": 3.0, "s5": 2.0, "s6": 1.0}
    curve = dict(topn_curve(da, metric))
    assert curve[4] == pytest.approx(-1.0, abs=1e-15)
    assert curve[6] > 0.9
    order = [f"s{i}" for i in range(6, 0, -1)]
    for n in (4, 5, 6):
        expected = pearson_oracle([da[s] for s in order[:n]], [metric[s] for s in order[:n]])
        assert curve[n] == pytest.approx(expected, abs=1e-12)


def test_topn_full_matches_table():
    rng = np.random.default_rng(3)
    da = spread_da(12, seed=3)
    metric = {s: v + rng.normal(0, 0.2) for s, v in da.items()}
    table = correlations_with_without_outliers(da, matrix_of({"m": metric}))
    assert topn_curve(da, metric)[0][1] == table.r[("m", ALL)]


def test_topn_ties_broken_by_id():
    da = {"b": 1.0, "a": 1.0, "c": 0.5, "d": 0.2, "e": 0.0}
    metric = {"a": 3.0, "b": 1.0, "c": 2.0, "d": 0.0, "e": 5.0}
    curve = dict(topn_curve(da, metric, n_min=3))
    assert curve[3] == pytest.approx(pearson_oracle([1.0, 1.0, 0.5], [3.0, 1.0, 2.0]), abs=1e-12)


def test_window_examples():
    da = spread_da(6)
    single = rolling_window_curve(da, {s: v ** 3 for s, v in da.items()}, window=6)
    full = pearson_oracle(list(da.values()), [v ** 3 for v in da.values()])
    assert single.values == pytest.approx((full,), abs=1e-12)

    anti = rolling_window_curve(da, {s: -v for s, v in da.items()}, window=4)
    assert all(r == pytest.approx(-1.0, abs=1e-15) for r in anti.values)


def test_window_fixture_against_oracle():
    da = {f"s{i}": float(v) for i, v in enumerate([0.5, -0.1, 0.3, 0.9, -0.6, 0.0, 0.7, 0.2])}
    metric = {f"s{i}": float(v) for i, v in enumerate([30, 22, 31, 35, 20, 26, 29, 25])}
    curve = rolling_window_curve(da, metric, window=4)
    assert len(curve.values) == 5
    ascending = sorted(da, key=da.get)
    assert curve.systems == tuple(ascending)
    for i, r in enumerate(curve.values):
        win = ascending[i:i + 4]
        assert r == pytest.approx(pearson_oracle([da[s] for s in win], [metric[s] for s in win]),
                                  abs=1e-12)


def test_window_errors_and_undefined_points():
    da = spread_da(5)
    with pytest.raises(InsufficientDataError):
        rolling_window_curve(da, da, window=8)
    flat_start = {s: (0.0 if i < 4 else 1.0) for i, s in enumerate(sorted(da, key=da.get))}
    curve = rolling_window_curve(da, flat_start, window=4)
    assert curve.values[0] is None and curve.values[1] is not None
    text = write_curve_csv(curve.rows("m"))
    assert text.splitlines()[1].endswith("undefined")


@st.composite
def relabelled(draw):
    n = draw(st.integers(4, 10))
    da_vals = draw(st.lists(st.floats(-2, 2), min_size=n, max_size=n, unique=True))
    m_vals = draw(st.lists(st.floats(0, 100), min_size=n, max_size=n))
    names = draw(st.lists(st.text("abcdefghij", min_size=1, max_size=4),
                          min_size=n, max_size=n, unique=True))
    return da_vals, m_vals, names


@given(relabelled())
def test_curves_invariant_under_relabelling(case):
    da_vals, m_vals, names = case
    da1 = {f"s{i}": v for i, v in enumerate(da_vals)}
    m1 = {f"s{i}": v for i, v in enumerate(m_vals)}
    da2 = dict(zip(names, da_vals))
    m2 = dict(zip(names, m_vals))
    assert topn_curve(da1, m1) == topn_curve(da2, m2)
    assert rolling_window_curve(da1, m1, 4).values == rolling_window_curve(da2, m2, 4).values


# --------------------------------------------------------------------------
# subsampling

def test_subsample_full_size_and_identity():
    da = spread_da(9)
    noisy = {s: v * 2 + (0.1 if i % 2 else -0.1) for i, (s, v) in enumerate(da.items())}
    full = pearson_oracle(list(da.values()), list(noisy.values()))
    res = subsample_correlations(da, {"da": da, "noisy": noisy}, k=9, trials=5, seed=1)
    [(group, by_metric)] = res.samples.items()
    assert by_metric["noisy"] == pytest.approx([full] * 5, abs=1e-12)
    assert by_metric["da"] == pytest.approx([1.0] * 5, abs=1e-15)


def test_subsample_groups_and_determinism():
    da = spread_da(22, seed=5)
    da["out1"], da["out2"] = -5.0, -6.0
    metric = {s: v + 0.05 * (i % 3) for i, (s, v) in enumerate(sorted(da.items()))}
    a = subsample_correlations(da, {"m": metric}, k=10, trials=200, seed=7)
    b = subsample_correlations(da, {"m": metric}, k=10, trials=200, seed=7)
    assert a == b
    assert a.designated == ("out1", "out2")
    assert set(a.samples) <= {(), ("out1",), ("out2",), ("out1", "out2")}
    assert sum(len(g["m"]) for g in a.samples.values()) == 200
    c = subsample_correlations(da, {"m": metric}, k=10, trials=200, seed=8)
    assert c != a
    json.dumps(a.to_dict())


def test_subsample_errors():
    da = spread_da(5)
    with pytest.raises(InvalidInputError):
        subsample_correlations(da, {"m": da}, k=6, trials=1, seed=0)
    with pytest.raises(InvalidInputError):
        subsample_correlations(da, {"m": da}, k=4, trials=0, seed=0)


# --------------------------------------------------------------------------
# Williams test

def test_williams_equal_correlations():
    t, p = williams_test(0.7, 0.7, 0.5, 10)
    assert t == 0 and p == 0.5


def test_williams_against_oracle():
    t, p = williams_test(0.95, 0.80, 0.85, 16)
    t_o, p_o = williams_oracle(0.95, 0.80, 0.85, 16)
    assert t == pytest.approx(t_o, rel=1e-12)
    assert p == pytest.approx(p_o, rel=1e-9)


@given(st.floats(-0.99, 0.99), st.floats(-0.99, 0.99), st.floats(-0.99, 0.99),
       st.integers(4, 60))
def test_williams_oracle_property(r12, r13, r23, n):
    k = 1 - r12 ** 2 - r13 ** 2 - r23 ** 2 + 2 * r12 * r13 * r23
    if k < 1e-6:
        return
    t, p = williams_test(r12, r13, r23, n)
    t_o, p_o = williams_oracle(r12, r13, r23, n)
    assert t == pytest.approx(t_o, rel=1e-9, abs=1e-12)
    assert p == pytest.approx(p_o, rel=1e-6, abs=1e-15)
    assert williams_test(r13, r12, r23, n).t == pytest.approx(-t, rel=1e-12, abs=1e-15)


def test_williams_grows_as_r23_approaches_one():
    ts = [williams_test(0.9, 0.85, r23, 20).t for r23 in (0.90, 0.93, 0.95, 0.97)]
    assert ts == sorted(ts) and ts[0] > 0


def test_williams_errors():
    with pytest.raises(InsufficientDataError):
        williams_test(0.5, 0.4, 0.3, 3)
    with pytest.raises(InvalidMatrixError):
        williams_test(0.9, -0.9, 0.9, 10)
    with pytest.raises(InvalidInputError):
        williams_test(1.2, 0.4, 0.3, 10)


# --------------------------------------------------------------------------
# ranking

def test_rank_single_and_identical():
    da = spread_da(10)
    metric = {s: v + 0.1 * np.sin(i) for i, (s, v) in enumerate(da.items())}
    assert rank_metrics(da, {"only": metric}) == {"only"}
    assert rank_metrics(da, {"a": metric, "b": dict(metric)}) == {"a", "b"}


def test_rank_da_beats_noise():
    rng = np.random.default_rng(14)
    da = {f"s{i}": float(v) for i, v in enumerate(rng.normal(size=14))}
    noise = {s: float(v) for s, v in zip(da, rng.normal(size=14))}
    assert rank_metrics(da, {"exact": da, "noise": noise}) == {"exact"}
    # agrees with the oracle's verdict
    r_exact = 1.0
    r_noise = pearson_oracle(list(da.values()), list(noise.values()))
    assert williams_oracle(r_exact, r_noise, r_noise, 14)[1] < 0.05


def test_rank_uses_oriented_scores():
    rng = np.random.default_rng(2)
    da = {f"s{i}": float(v) for i, v in enumerate(rng.normal(size=12))}
    reversed_ = {s: -v + 0.3 * np.cos(i) for i, (s, v) in enumerate(da.items())}
    # an anti-correlated score is outperformed once orientation is applied
    assert rank_metrics(da, {"good": da, "bad": reversed_}) == {"good"}


@given(st.integers(0, 10_000), st.integers(2, 4))
def test_rank_never_empty(seed, n_metrics):
    rng = np.random.default_rng(seed)
    da = {f"s{i}": float(v) for i, v in enumerate(rng.normal(size=8))}
    metrics = {f"m{j}": {s: float(v) for s, v in zip(da, rng.normal(size=8))}
               for j in range(n_metrics)}
    assert rank_metrics(da, metrics)
