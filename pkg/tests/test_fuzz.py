import numpy as np
import pytest

from majcert import graph as gr
from majcert.certification import fuzz
from majcert.dynamics import orbit, parse_config


def no_pred(g, x, T, flip):
    y = orbit(g, x).state(T).copy()
    y[flip] ^= 1
    return fuzz.PredInstance(g, x, y, T, g.n)


def test_pred_no_instance_has_no_accepts():
    inst = no_pred(gr.cycle_graph(7), parse_config("1101001"), 3, 4)
    rep = fuzz.fuzz_soundness(inst, "pred", 30, seed=1)
    assert rep.ok, rep.summary()
    assert rep.trials == 30 * len(fuzz.PRED_STRATEGIES)
    assert set(rep.per_strategy) == set(fuzz.PRED_STRATEGIES)


def test_count_ones_off_by_one():
    g = gr.grid_graph(3, 3)
    z = parse_config("101100110")
    rep = fuzz.fuzz_soundness(fuzz.CountOnesInstance(g, z, int(z.sum()) + 1), "count-ones", 30, seed=2)
    assert rep.ok, rep.summary()


def test_prediction_no_instance():
    g = gr.cycle_graph(6)
    x = parse_config("110000")
    inst = fuzz.PredictionInstance(g, x, 2, 6)
    assert not inst.is_yes()
    rep = fuzz.fuzz_soundness(inst, "prediction", 20, seed=3)
    assert rep.ok, rep.summary()


def test_yes_instance_refused():
    g = gr.cycle_graph(4)
    x = parse_config("1101")
    with pytest.raises(ValueError):
        fuzz.fuzz_soundness(fuzz.PredictionInstance(g, x, 3, 4), "prediction", 1, seed=0)


def test_harness_catches_a_broken_verifier(monkeypatch):
    # a verifier that skips the target check must be caught by the forgeries
    from majcert.certification import election_pred as ep

    original = ep.verify_node

    def lax(view, params, dense=False):
        r = original(view, params, dense)
        return None if r is not None and r.code == "target_mismatch" else r

    monkeypatch.setattr(ep, "verify_node", lax)
    inst = no_pred(gr.path_graph(5), parse_config("11010"), 2, 0)
    rep = fuzz.fuzz_soundness(inst, "pred", 3, seed=0, strategies=["honest"])
    assert not rep.ok and rep.violations[0].reproducer["certs"]


@pytest.mark.parametrize("protocol", ["pred", "count-ones", "prediction"])
def test_sanity_honest_yes(protocol):
    g = gr.cycle_graph(5)
    x = parse_config("11011")
    if protocol == "pred":
        inst = fuzz.PredInstance(g, x, orbit(g, x).state(3), 3, 5)
    elif protocol == "count-ones":
        inst = fuzz.CountOnesInstance(g, x, 4)
    else:
        inst = fuzz.PredictionInstance(g, x, 3, 5)
    assert inst.is_yes() and fuzz.mutation_sanity(inst, protocol)


def test_forced_trajectory_respects_pins():
    g = gr.cycle_graph(5)
    x = parse_config("10000")
    traj = fuzz.forced_trajectory(g, x, 6, {(2, 3): 1}, {4: (2, 1)})
    assert traj[3, 2] == 1 and traj[2, 4] == traj[4, 4] == traj[6, 4] == 1


def test_reports_are_reproducible():
    inst = no_pred(gr.cycle_graph(6), parse_config("110100"), 4, 1)
    a = fuzz.fuzz_soundness(inst, "pred", 5, seed=9)
    b = fuzz.fuzz_soundness(inst, "pred", 5, seed=9)
    assert a.per_strategy == b.per_strategy
