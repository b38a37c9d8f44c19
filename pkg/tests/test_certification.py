from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, strategies as st

from majcert import graph as gr
from majcert.certification import bundle, composite, count_ones
from majcert.certification import election_pred as ep
from majcert.certification.count_ones import TreeCert
from majcert.certification.election_pred import ChangeCert, ProverRefusal
from majcert.certification.harness import NodeView, node_view
from majcert.dynamics import orbit, parse_config, state_at
from test_dynamics import graph_and_config


def cfg(s):
    return parse_config(s)


# ELECTION-PRED -------------------------------------------------------------


def test_fixed_point_anchors_only():
    g = gr.grid_graph(2, 3)
    x = np.ones(6, dtype=np.uint8)
    for c in ep.prove_election_pred(g, x, x, 7):
        assert c == ChangeCert(((1, 0),), ((1, 1),))


def test_edge_certificates():
    c = ep.prove_election_pred(gr.single_edge(), cfg("01"), cfg("01"), 2)
    assert c[0] == ChangeCert(((0, 0),), ((1, 1),))
    assert c[1] == ChangeCert(((1, 0),), ((0, 1),))


def test_c4_1101_extra_entry():
    c = ep.prove_election_pred(gr.cycle_graph(4), cfg("1101"), cfg("1111"), 5)
    assert c[2] == ChangeCert(((0, 0), (1, 2)), ((1, 1),))
    assert all(c[v].entries() == 2 for v in (0, 1, 3))


def test_reconstruct_examples():
    assert ep.reconstruct_orbit(ChangeCert(((0, 0),), ((1, 1),)), 5) == [0, 1, 0, 1, 0, 1]
    assert ep.reconstruct_orbit(ChangeCert(((1, 0),), ((1, 1),)), 3) == [1, 1, 1, 1]
    assert ep.reconstruct_orbit(ChangeCert(((0, 0), (1, 2)), ((0, 1),)), 5) == [0, 0, 1, 0, 1, 0]


def test_reconstruct_malformed():
    with pytest.raises(ValueError):
        ep.reconstruct_orbit(ChangeCert(((0, 2),), ((1, 1),)), 3)
    with pytest.raises(ValueError):
        ep.reconstruct_orbit(ChangeCert(((0, 0), (1, 4), (0, 2)), ((1, 1),)), 3)


def test_honest_prover_refuses():
    with pytest.raises(ProverRefusal):
        ep.prove_election_pred(gr.cycle_graph(4), cfg("1101"), cfg("1011"), 3)


def test_target_flip_rejected_at_that_node():
    g = gr.cycle_graph(6)
    x = cfg("110100")
    y = state_at(g, x, 4).copy()
    certs = ep.prove_election_pred(g, x, y, 4)
    y[3] ^= 1
    v = ep.verify_election_pred(g, x, y, 4, g.n, certs)
    assert 3 in v.rejecting and v.results[3].code == "target_mismatch"


def test_time_shift_rejected_nearby():
    g = gr.cycle_graph(4)
    x, y = cfg("1101"), cfg("1111")
    certs = ep.prove_election_pred(g, x, y, 5)
    certs[2] = ChangeCert(((0, 0), (1, 4)), ((0, 1),))
    v = ep.verify_election_pred(g, x, y, 5, 4, certs)
    assert not v.accepted
    assert set(v.rejecting) <= {1, 2, 3}
    assert any(v.results[u].code == "majority_mismatch" for u in v.rejecting)


def test_bad_anchor_rejected():
    g = gr.single_edge()
    certs = ep.prove_election_pred(g, cfg("01"), cfg("01"), 2)
    certs[0] = ChangeCert(((1, 0),), ((1, 1),))
    v = ep.verify_election_pred(g, cfg("01"), cfg("01"), 2, 2, certs)
    assert v.results[0].code == "initial_mismatch"


@pytest.mark.parametrize(
    "cert",
    [
        ChangeCert((), ((1, 1),)),
        ChangeCert(((0, 1),), ((1, 1),)),
        ChangeCert(((0, 0), (0, 2)), ((1, 1),)),
        ChangeCert(((0, 0), (1, 100)), ((1, 1),)),
        ChangeCert(((0, 0),), ((True, 1),)),
        "garbage",
    ],
)
def test_malformed_certificates_rejected(cert):
    g = gr.single_edge()
    certs = ep.prove_election_pred(g, cfg("01"), cfg("01"), 2)
    certs[1] = cert
    v = ep.verify_election_pred(g, cfg("01"), cfg("01"), 2, 2, certs)
    assert v.results[1] is not None and v.results[0] is not None


def test_large_T_parity():
    g = gr.path_graph(4)
    x = cfg("1010")
    for T in (10**6, 10**6 + 1):
        y = state_at(g, x, T)
        certs = ep.prove_election_pred(g, x, y, T)
        assert ep.verify_election_pred(g, x, y, T, 4, certs).accepted


def test_cert_size_formula():
    c = ChangeCert(((0, 0), (1, 2)), ((0, 1),))
    assert ep.cert_size_bits(c, 4) == 3 * (1 + 5)


@given(graph_and_config(), st.integers(1, 40), st.integers(0, 3))
def test_completeness_and_dense_equivalence(gx, T, extra):
    g, x = gx
    N = g.n + extra
    o = orbit(g, x)
    y = o.state(T)
    certs = ep.prove_election_pred(g, x, y, T, N)
    assert ep.verify_election_pred(g, x, y, T, N, certs).accepted
    assert ep.verify_election_pred(g, x, y, T, N, certs, dense=True).accepted
    for v in range(g.n):
        traj = ep.reconstruct_orbit(certs[v], N * N)
        assert traj == [int(o.state(t)[v]) for t in range(N * N + 1)]


@given(graph_and_config(), st.integers(1, 20), st.data())
def test_event_window_matches_dense_on_forgeries(gx, T, data):
    g, x = gx
    H = g.n * g.n
    traj = np.array([orbit(g, x).state(t) for t in range(H + 1)])
    flips = data.draw(st.lists(st.tuples(st.integers(0, H), st.integers(0, g.n - 1)), max_size=4))
    for t, v in flips:
        traj[t, v] ^= 1
    certs = [ep.cert_from_sequence(traj[:, v].tolist()) for v in range(g.n)]
    y = traj[min(T, H) if T <= H else H - ((H - T) % 2)]
    a = ep.verify_election_pred(g, x, y, T, g.n, certs)
    b = ep.verify_election_pred(g, x, y, T, g.n, certs, dense=True)
    assert [r is None for r in a.results] == [r is None for r in b.results]


# Count-Ones ----------------------------------------------------------------


def test_count_ones_p3():
    g = gr.path_graph(3)
    certs = count_ones.prove_count_ones(g, [1, 0, 1], 2)
    assert certs[0] == TreeCert(1, 1, 0, 2)
    assert count_ones.verify_count_ones(g, [1, 0, 1], 2, certs).accepted


def test_count_ones_zero():
    g = gr.grid_graph(3, 3)
    z = [0] * 9
    certs = count_ones.prove_count_ones(g, z, 0)
    assert all(c.count == 0 for c in certs)
    assert count_ones.verify_count_ones(g, z, 0, certs).accepted
    v = count_ones.verify_count_ones(g, z, 1, certs)
    assert v.rejecting == [0] and v.results[0].code == "root_count"


def test_count_ones_refuses():
    with pytest.raises(ProverRefusal):
        count_ones.prove_count_ones(gr.path_graph(3), [1, 0, 1], 1)


def test_inflated_leaf_caught_by_parent():
    g = gr.path_graph(4)
    z = [0, 1, 1, 0]
    certs = count_ones.prove_count_ones(g, z, 2)
    certs[3] = replace(certs[3], count=1)
    v = count_ones.verify_count_ones(g, z, 2, certs)
    assert v.results[3].code == "count_mismatch" and v.results[2].code == "count_mismatch"


def test_two_roots_disagree():
    g = gr.cycle_graph(5)
    z = [1, 0, 0, 1, 0]
    certs = count_ones.prove_count_ones(g, z, 2)
    certs[3] = replace(certs[3], root=4)
    assert not count_ones.verify_count_ones(g, z, 2, certs).accepted


def test_bfs_tree_ties_use_smaller_id():
    g = gr.cycle_graph(4)
    parent, depth = count_ones.bfs_tree(g)
    assert parent == [0, 0, 1, 0] and depth == [0, 1, 2, 1]
    h = gr.with_ids(g, [9, 3, 7, 4])
    parent, _ = count_ones.bfs_tree(h)
    assert parent[1] == 1 and parent[3] == 2  # id 7 beats id 9


@given(graph_and_config(), st.integers(0, 10**6))
def test_count_ones_completeness_with_random_ids(gx, seed):
    g, z = gx
    g = gr.random_ids(g, np.random.default_rng(seed))
    k = int(z.sum())
    certs = count_ones.prove_count_ones(g, z, k)
    assert count_ones.verify_count_ones(g, z, k, certs).accepted
    assert not count_ones.verify_count_ones(g, z, k + 1, certs).accepted


# composite -----------------------------------------------------------------


def test_prediction_c4():
    g = gr.cycle_graph(4)
    certs = composite.prove_election_prediction(g, cfg("1101"), 4)
    assert all((c.y, c.n, c.p) == (1, 4, 4) for c in certs)
    assert composite.verify_election_prediction(g, cfg("1101"), 4, 4, certs).accepted


def test_prediction_refuses_edge():
    with pytest.raises(ProverRefusal):
        composite.prove_election_prediction(gr.single_edge(), cfg("01"), 1)


def test_prediction_all_ones():
    g = gr.grid_graph(2, 3)
    certs = composite.prove_election_prediction(g, np.ones(6, dtype=np.uint8), 1)
    assert all(c.p == c.n == 6 for c in certs)


def test_decremented_p_caught_by_count():
    g = gr.cycle_graph(4)
    certs = composite.prove_election_prediction(g, cfg("1101"), 4)
    certs = [replace(c, p=c.p - 1) for c in certs]
    v = composite.verify_election_prediction(g, cfg("1101"), 4, 4, certs)
    assert [v.results[u].code for u in v.rejecting] == ["ones_y:root_count"]


def test_neighbours_must_agree_on_counts():
    g = gr.path_graph(3)
    x = cfg("111")
    certs = composite.prove_election_prediction(g, x, 1)
    certs[2] = replace(certs[2], n=5)
    v = composite.verify_election_prediction(g, x, 1, 3, certs)
    assert "count_disagreement" in {v.results[u].code for u in v.rejecting}


@given(graph_and_config(), st.integers(1, 30))
def test_prediction_completeness(gx, T):
    g, x = gx
    y = orbit(g, x).state(T)
    if 2 * int(y.sum()) > g.n:
        certs = composite.prove_election_prediction(g, x, T)
        assert composite.verify_election_prediction(g, x, T, g.n, certs).accepted
    else:
        with pytest.raises(ProverRefusal):
            composite.prove_election_prediction(g, x, T)


# harness and bundles ------------------------------------------------------


def test_node_view_is_local():
    g = gr.path_graph(4)
    certs = ["a", "b", "c", "d"]
    view = node_view(g, 1, certs, [{"x": 0}] * 4)
    assert isinstance(view, NodeView)
    assert view.cert == "b" and sorted(view.neighbor_certs()) == ["a", "c"]
    assert view.degree == 2 and view.id == 2


@pytest.mark.parametrize("problem", ["pred", "count-ones", "prediction"])
def test_bundle_round_trip(problem):
    g = gr.cycle_graph(4)
    x = cfg("1101")
    if problem == "pred":
        certs = ep.prove_election_pred(g, x, cfg("1111"), 3)
    elif problem == "count-ones":
        certs = count_ones.prove_count_ones(g, x, 3)
    else:
        certs = composite.prove_election_prediction(g, x, 3)
    text = bundle.dumps(problem, certs, T=3)
    p, back, params = bundle.loads(text)
    assert p == problem and back == certs and params == {"T": 3}
    rep = bundle.size_report(problem, certs, 4)
    assert rep["nodes"] == 4 and rep["total_bits"] >= rep["max_node_bits"] > 0


def test_bundle_bad_problem():
    with pytest.raises(ValueError):
        bundle.loads('{"problem": "nope", "records": {}}')
