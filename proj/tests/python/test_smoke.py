import math

import pytest

import regdiv


def test_reference_params():
    p = regdiv.reference_params()
    assert p["lambda1"] == 10.0 and p["theta2"] == 0.2


def test_solve_case_c():
    sel = regdiv.solve({"mu2": 0.9})
    assert sel.case == "C"
    d = regdiv.selection_dict(sel)
    pol = d["policy"]
    assert pol["type"] == "liquidation_barrier"
    assert abs(pol["d1"] - 0.245) < 2e-3
    assert abs(pol["b1"] - 1.022) < 2e-3
    assert abs(pol["b2"] - 0.845) < 2e-3
    assert d["verified"] is True
    # slope 1 above the top barrier
    assert sel.value(2.0, 1, 1) == pytest.approx(1.0, abs=1e-12)


def test_case_a_and_threshold():
    assert regdiv.case_a_threshold() == pytest.approx(-0.4, abs=1e-12)
    assert regdiv.solve({"mu2": -0.5}).case == "A"


def test_verify_rejects_shifted_barrier():
    d = regdiv.selection_dict(regdiv.solve({"mu2": 0.9}))
    pol = dict(d["policy"])
    assert regdiv.verify({"mu2": 0.9}, pol)["passed"]
    pol["b1"] += 0.01
    rep = regdiv.verify({"mu2": 0.9}, pol)
    assert not rep["passed"]
    assert any("b1" in f for f in rep["failures"])


def test_bad_input_raises():
    with pytest.raises(regdiv.RegdivError):
        regdiv.solve({"sigma1": -1.0})
    with pytest.raises(ValueError):
        regdiv.solve({"kappa": 1.0})


def test_simulate_matches_analytic_roughly():
    params = {"mu2": 0.2}
    sel = regdiv.solve(params)
    pol = regdiv.selection_dict(sel)["policy"]
    est = regdiv.simulate(params, pol, 0.5, 2, n_paths=4000, seed=3, antithetic=True)
    v = sel.value(0.5, 2)
    assert abs(est["mean"] - v) < 5 * est["std_error"] + 1e-3
    again = regdiv.simulate(params, pol, 0.5, 2, n_paths=4000, seed=3, antithetic=True)
    assert again == est


def test_candidate_value_case_a():
    # liquidate at once: the payout is x minus the current regime's theta
    pol = {"type": "liquidate_both"}
    assert regdiv.candidate_value({"mu2": -0.5}, pol, 0.5, 1) == pytest.approx(0.7)
    assert regdiv.candidate_value({"mu2": -0.5}, pol, 0.5, 2) == pytest.approx(0.3)


def test_sweep_ladder():
    out = regdiv.sweep({}, "mu2", [-0.5, 0.2, 0.9, 1.4])
    assert [r["case"] for r in out["rows"]] == ["A", "B", "C", "D"]
    assert all(r["verified"] for r in out["rows"])


def test_reproduce_table():
    t = regdiv.reproduce_table(2)
    assert t["passed"]
    assert t["max_abs_diff"] <= t["tolerance"]


def test_figure_data():
    fig = regdiv.figure_data("value_function", {"mu2": 0.9}, points=21)
    assert fig["columns"][0] == "x"
    assert len(fig["rows"]) == 21
    assert all(math.isfinite(v) for row in fig["rows"] for v in row if v is not None)


def test_roots():
    a1, a2 = regdiv.quadratic_roots(-0.8, 0.5, 10.0, 0.5)
    assert a1 > 0 > a2
    q = regdiv.quartic_roots({"mu2": 0.9})
    b = regdiv.quartic_roots({"mu2": 0.9}, backend="bisection")
    assert q[0] < q[1] < 0 < q[2] < q[3]
    assert all(abs(x - y) < 1e-9 for x, y in zip(q, b))
