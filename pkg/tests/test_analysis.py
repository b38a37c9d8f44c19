from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from majcert import analysis as an
from majcert import graph as gr
from majcert.dynamics import orbit, parse_config
from test_dynamics import graph_and_config


def test_energy_p3_alternating():
    s = an.energy_series(gr.path_graph(3), parse_config("101"))
    assert s.values[:2] == [1, 1]


def test_energy_all_zeros():
    s = an.energy_series(gr.cycle_graph(6), parse_config("000000"))
    assert set(s.values) == {0}


def test_energy_c4_1101():
    v = an.energy_series(gr.cycle_graph(4), parse_config("1101"), length=4).values
    assert v[0] > v[1] and v[1] == v[2] == v[3]


def test_default_alpha():
    assert an.default_alpha(gr.cycle_graph(5)) == Fraction(1, 2)
    assert an.default_alpha(gr.random_cubic(8, np.random.default_rng(1))) == Fraction(1, 2)
    assert an.default_alpha(gr.torus_graph(4, 4)) == Fraction(2, 3)
    assert an.default_alpha(gr.complete_graph(6)) == Fraction(5, 7)


def test_centered_alpha_range():
    with pytest.raises(ValueError):
        an.centered_energy_series(gr.cycle_graph(4), parse_config("1101"), 0, Fraction(1))


def test_centered_fixed_point_constant():
    s = an.centered_energy_series(gr.grid_graph(3, 3), np.ones(9, dtype=np.uint8), 4, length=5)
    assert len(set(s.values)) == 1


def test_centered_edge_cycle_constant():
    s = an.centered_energy_series(gr.single_edge(), parse_config("01"), 0, Fraction(1, 3), length=6)
    assert len(set(s.values)) == 1


def test_literal_centered_form_counterexample():
    # E_r^{t+1} - E_r^t <= -c_r^t does not hold as written: P5, x = 01001, r = 4
    g = gr.path_graph(5)
    o = orbit(g, parse_config("01001"))
    assert an.centered_literal_violations(g, o, 4) == [1]
    assert an.centered_drop_violations(g, o, 4) == []


def test_budget_uses_first_energy_term():
    g = gr.path_graph(3)
    o = orbit(g, parse_config("001"))
    total, e0, e1 = an.centered_budget(g, o, 2)
    assert (total, e0, e1) == (1, 1, 0)


@given(graph_and_config())
def test_global_energy_invariants(gx):
    g, x = gx
    s = an.energy_series(g, x)
    assert an.global_energy_violations(s, g.m) == []


@given(graph_and_config(), st.data())
def test_centered_drop(gx, data):
    g, x = gx
    r = data.draw(st.integers(0, g.n - 1))
    o = orbit(g, x)
    assert an.centered_drop_violations(g, o, r) == []
    total, e0, _ = an.centered_budget(g, o, r)
    assert total <= e0


@given(graph_and_config())
def test_batch_energy_matches(gx):
    g, x = gx
    o = orbit(g, x)
    states = [o.state(t)[None, :] for t in range(o.transient + 3)]
    E = an.global_energy_batch(g, states)
    assert list(E[:, 0]) == an.energy_series(g, x, o, length=len(states) - 1).values


def test_change_stats_examples():
    g = gr.cycle_graph(4)
    assert an.change_stats(g, [parse_config("1111"), parse_config("0000")]).max_changes == 0
    assert an.change_stats(g, [parse_config("1101")]).max_changes == 1


@given(graph_and_config())
def test_change_counts_bounded_by_transient(gx):
    g, x = gx
    st_ = an.change_stats(g, [x])
    assert (st_.counts >= 0).all() and st_.counts.max() <= st_.max_transient
    counts, trans = an.change_counts_fast(g, x[None, :])
    assert np.array_equal(counts[0], st_.counts)
    assert trans[0] == orbit(g, x).transient


def test_cert_bits_formula():
    assert an.cert_bits(0, 4) == 2 * (1 + 5)
    assert an.cert_bits(3, 64) == 5 * (1 + 13)


def test_scaling_experiment_rows():
    rows = an.scaling_experiment("torus", [4, 8], 4, seed=3)
    assert [r.n for r in rows] == [16, 64]
    assert rows == an.scaling_experiment("torus", [4, 8], 4, seed=3)
    csv = an.rows_to_csv(rows)
    assert csv.splitlines()[0] == ",".join(an.CSV_COLUMNS)


@pytest.mark.parametrize("sizes, samples", [([], 4), ([8, 4], 4), ([4], 0)])
def test_scaling_experiment_errors(sizes, samples):
    with pytest.raises(ValueError):
        an.scaling_experiment("torus", sizes, samples, seed=0)


def test_path_family_bounded():
    rows = an.scaling_experiment("path", [16, 64, 256], 16, seed=5)
    assert max(r.max_changes for r in rows) <= 2


def test_fit_log_growth():
    ns = [16, 256, 4096]
    fit = an.fit_log_growth(ns, [4, 8, 12])
    assert fit["slope"] == pytest.approx(1.0)
    assert fit["r2"] == pytest.approx(1.0)
    assert fit["c"] == pytest.approx(1.0)
