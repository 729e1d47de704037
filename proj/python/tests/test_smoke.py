import json

import numpy as np
import pytest

import pdtune


def instance(rng, m=12, d=3):
    A = rng.standard_normal((m, d))
    Av = rng.standard_normal((m, d))
    return pdtune.ProblemInstance(A, rng.standard_normal(m), Av, rng.standard_normal(m))


def test_version():
    assert pdtune.__version__ == "0.1.0"


def test_bounds():
    r = pdtune.pdim_fused_lasso(4)
    assert r.bound_value == 16
    assert pdtune.pdim_elastic_net(3).bound_value > 0
    assert pdtune.sample_complexity(10, 1.0, 0.1, 0.05) > 0


def test_elastic_net_tiny_penalty_is_near_ols():
    rng = np.random.default_rng(0)
    x = instance(rng)
    sol = pdtune.elastic_net_solve(x, 1e-10, 1e-10)
    ols, *_ = np.linalg.lstsq(x.A, x.b, rcond=None)
    np.testing.assert_allclose(sol.theta, ols, atol=1e-6)
    assert len(sol.sign_pattern) == 3


def test_fused_lasso_identity():
    A = np.eye(2)
    b = np.array([1.0, 3.0])
    x = pdtune.ProblemInstance(A, b, A, b)
    dual = pdtune.fused_lasso_dual_solve(x, np.array([0.5]))
    theta = pdtune.fused_lasso_primal_recover(x, dual)
    np.testing.assert_allclose(theta, [1.5, 2.5], atol=1e-9)


def test_group_lasso_and_loss():
    rng = np.random.default_rng(1)
    x = instance(rng, d=4)
    res = pdtune.group_lasso_solve(x, np.array([0.1, 0.2]), [2, 2])
    assert res.theta.shape == (4,)
    assert pdtune.validation_loss(x, res.theta, "group") >= 0


def test_rank_deficient_raises():
    A = np.ones((5, 2))
    x = pdtune.ProblemInstance(A, np.ones(5), A, np.ones(5))
    with pytest.raises(pdtune.RankDeficientError):
        pdtune.fused_lasso_dual_solve(x, np.array([0.1]))


def test_erm_tune_matches_grid_minimum():
    spec = pdtune.DistributionSpec(kind="gaussian-dense", m=10, m_val=10, d=3, seed=3)
    xs = pdtune.gen_instances(spec, 5)
    grid = pdtune.AlphaGrid(2, 0.01, 1.0, 4)
    res = pdtune.erm_tune("elastic", xs, grid)
    assert res.empirical_loss == pytest.approx(min(res.mean_losses))
    assert res.mean_losses[res.index] == res.empirical_loss


def test_max_shattered():
    L = np.outer(np.arange(1, 4), np.linspace(0.0, 1.0, 6))
    out = pdtune.max_shattered(L)
    assert out["size"] == 1
    assert out["verified"]


def test_gj_analyze():
    prog = {
        "inputs": 1,
        "output": 1,
        "nodes": [
            {"id": 0, "kind": "input", "index": 0},
            {"id": 1, "kind": "arith", "op": "*", "left": 0, "right": 0},
        ],
    }
    out = pdtune.gj_analyze(json.dumps(prog), 1)
    assert out["degree"] == 2
