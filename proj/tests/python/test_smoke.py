import math

import pytest

import confpi


def test_threshold_and_intervals():
    assert confpi.icp_threshold([1, 2, 3, 4], 0.3) == 4.0
    assert math.isinf(confpi.icp_threshold(list(range(1, 10)), 0.05))
    f = confpi.icp_interval(50.0, 4.0, 0.1)
    assert (f.lower, f.upper) == (46.0, 54.0)
    g = confpi.ncp_interval(50.0, 2.0, 3.0, 1e-6, 0.1)
    assert (g.lower, g.upper) == (44.0, 56.0)


def test_metrics():
    assert confpi.winkler(8, 10, 20, 0.1) == pytest.approx(50)
    assert confpi.pinball(50, 60, 0.95) == pytest.approx(9.5)
    assert confpi.coverage([1, 0, 1, 0]) == 0.5
    r = confpi.christoffersen([i % 2 for i in range(200)], 0.5)
    assert r["lr_ind"] > 100
    assert r["lr_cc"] == pytest.approx(r["lr_uc"] + r["lr_ind"])


def test_transform_roundtrip():
    assert confpi.yj_apply(2.0, -3.0) == pytest.approx(-math.log(4))
    assert confpi.yj_invert(0.0, math.log(5)) == pytest.approx(4.0)


def test_lattice_names():
    names = confpi.lattice_node_names()
    assert len(names) == 8
    assert "Conformal Prediction" in names
    assert confpi.LatticeVariant(True, True, True).name == "Normalized Conformal Prediction"


def test_errors_are_value_errors():
    with pytest.raises(ValueError):
        confpi.icp_threshold([], 0.1)


def test_small_backtest():
    panel = confpi.synthetic_panel(days=70, seed=2)
    assert panel.num_days() == 70
    assert panel.prices.shape == (70, 24)
    out = confpi.run_backtest(panel, param_days=60, models=["naive_e", "lasso_ncp"], alphas=[0.1], threads=1)
    assert len(out["date"]) == 2 * 24 * 2
    assert set(out["model"]) == {"Naive_E", "Lasso_NCP"}
    assert out["gaps"] == 0
    hits = out["hit"]
    assert all(h in (True, False) for h in hits)
