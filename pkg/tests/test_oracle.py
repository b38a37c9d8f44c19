import json

import numpy as np
import pytest

from majcert import graph as gr
from majcert import oracle
from majcert.dynamics import format_config, orbit, parse_config
from conftest import small_corpus


def test_single_edge_summary():
    s = oracle.enumerate_dynamics(gr.single_edge())
    assert (s.max_transient, s.max_period) == (0, 2)
    assert sorted(s.fixed_points) == ["00", "11"]
    assert [sorted(c) for c in s.two_cycles] == [["01", "10"]]
    doc = json.loads(s.to_json())
    assert doc["max_period"] == 2


def test_c4_summary():
    s = oracle.enumerate_dynamics(gr.cycle_graph(4))
    assert [sorted(c) for c in s.two_cycles] == [["0101", "1010"]]
    assert s.max_transient <= 4


def test_corpus_bounds():
    for g in small_corpus():
        s = oracle.enumerate_dynamics(g)
        assert s.max_transient <= g.m and s.max_period <= 2 and not s.other_cycles


def test_predecessors():
    assert oracle.predecessors(gr.cycle_graph(4), "0101") == {"1010"}
    assert oracle.predecessors(gr.cycle_graph(6), "010101") == {"101010"}
    g = gr.grid_graph(2, 3)
    assert "000000" in oracle.predecessors(g, "000000")


def test_c8_single_two_cycle():
    atts = oracle.classify_attractors(gr.cycle_graph(8))
    two = [a for a in atts if a.period == 2]
    assert len(two) == 1
    assert sorted(two[0].states) == ["01010101", "10101010"]
    assert two[0].basin == 2


def test_c7_no_two_cycles():
    assert all(a.period == 1 for a in oracle.classify_attractors(gr.cycle_graph(7)))


def test_paths_keep_the_alternating_cycle():
    # the endpoints copy their only neighbour, so 0101... still flips on P_n
    for n in (3, 5, 7):
        two = [a for a in oracle.classify_attractors(gr.path_graph(n)) if a.period == 2]
        alt = format_config(np.arange(n) % 2)
        assert len(two) == 1 and alt in two[0].states


def test_budget():
    with pytest.raises(oracle.BudgetExceeded):
        oracle.enumerate_dynamics(gr.cycle_graph(23))


def test_engine_agreement():
    rng = np.random.default_rng(3)
    for g in small_corpus()[:20]:
        s = oracle.enumerate_dynamics(g)
        for code in rng.integers(0, 1 << g.n, size=20):
            x = parse_config(oracle.to_bits(int(code), g.n))
            o = orbit(g, x)
            assert (o.transient, o.period) == (s.transient[code], s.period[code])
            seq = oracle.oracle_orbit(g, x, o.transient + 3)
            assert seq == [format_config(o.state(t)) for t in range(o.transient + 4)]


def test_table_csv():
    s = oracle.enumerate_dynamics(gr.single_edge())
    assert s.table_csv().splitlines() == ["config,transient,period", "00,0,1", "10,0,2", "01,0,2", "11,0,1"]
