import numpy as np
import pytest

import cvnn


def test_parameter_counts():
    assert cvnn.count_mlp_params("real", 784, [64], 10) == 50816
    assert cvnn.count_mlp_params("real", 784, [64] * 3, 10) == 59008
    assert cvnn.alternating_widths(64, 4, "complex") == [32, 64, 32, 64, 32]
    pair = cvnn.build_fixed_pair(784, 10, 64, 2)
    assert pair["real"]["params"] == pair["complex"]["params"] == 59008


def test_budget_widths():
    assert cvnn.budget_width_real(500000, 784, 10, 0) == 630
    assert cvnn.budget_width_complex(500000, 784, 10, 2) == 207
    pair = cvnn.build_budget_pair(10000, 46, 500000, 8)
    assert pair["real"]["widths"][0] == 48
    assert pair["complex"]["widths"][0] == 24
    with pytest.raises(ValueError):
        cvnn.build_budget_pair(784, 10, 100, 0)


def test_cmatmul_matches_numpy():
    rng = np.random.default_rng(0)
    x = rng.normal(size=(3, 4)) + 1j * rng.normal(size=(3, 4))
    w = rng.normal(size=(4, 2)) + 1j * rng.normal(size=(4, 2))
    np.testing.assert_allclose(cvnn.cmatmul(x, w), x @ w, atol=1e-12)


def test_activations():
    z = np.array([[3 + 4j, -1 + 2j]])
    np.testing.assert_allclose(cvnn.activate("abs2", z).real, [[25.0, 5.0]])
    np.testing.assert_allclose(cvnn.activate("relu", z), [[3 + 4j, 2j]])
    p = cvnn.activate("softmax_abs2", z)
    assert abs(p.real.sum() - 1.0) < 1e-12
    with pytest.raises(ValueError):
        cvnn.activate("gelu", z)


def test_synthetic_and_training():
    ds = cvnn.gen_synthetic("real", n_samples=300, seed=3)
    assert ds["x_train"].shape == (240, 25)
    assert np.all(ds["x_train"].imag == 0)
    assert ds["y_test"].shape == (60, 3)

    run = cvnn.train_run(domain="complex", k=2, m=8, dataset="synthetic_real", epochs=10, n_samples=400)
    assert not run.failed
    assert len(run.diagnostics) == 10
    assert 0.0 <= run.final_test_acc <= 1.0
    score = cvnn.follow_score(run.diagnostics)
    assert -1.0 <= score["delta_correlation"] <= 1.0


def test_plan_only():
    text = cvnn.plan_only({"dataset": "cifar10", "width_mode": "budget", "budget": "500000", "k": "8"})
    assert "123" in text and "69" in text
