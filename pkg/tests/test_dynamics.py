import math

import numpy as np
import pytest

from oscidyn.classify import Verdict
from oscidyn.dynamics import (SimulationError, certify_odts_order, detect_period, divisors,
                              eventual_monotonicity_check, invariant_set_probe,
                              lemma_edist_epsilon, simulate, variational_run)
from oscidyn.models import (DiscreteSystem, build_model, euler_linear, linear_tv,
                            perturbed_chain, phosphorelay, tanh_network)
from oscidyn.reproduce import euler_eigen_check


def test_simulate_identity_and_errors():
    sys_ = linear_tv({"A": [np.eye(3).tolist()]})
    traj = simulate(sys_, [1.0, 2.0, 3.0], 10)
    assert traj.states.shape == (11, 3)
    np.testing.assert_array_equal(traj.states, np.tile([1.0, 2.0, 3.0], (11, 1)))
    with pytest.raises(ValueError):
        simulate(phosphorelay(), [5.0, 0, 0, 0], 3)
    with pytest.raises(ValueError):
        simulate(sys_, [1.0, 2.0], 3)
    blowup = linear_tv({"A": [[[1e200, 0], [0, 1]]]})
    with np.errstate(over="ignore"), pytest.raises(SimulationError, match="step 2"):
        simulate(blowup, [1.0, 1.0], 5)


def test_exit_is_flagged_not_clamped():
    sys_ = linear_tv({"A": [[[2.0, 0], [0, 1]]], "omega": [[-10, 10]] * 2})
    traj = simulate(sys_, [1.0, 1.0], 6)
    assert traj.exit_step == 4 and traj.states[-1, 0] == 64


def test_euler_eigen_expansion():
    _, err = euler_eigen_check(0.3, 30)
    assert err < 1e-8


def test_phosphorelay_stays_in_omega():
    traj = simulate(phosphorelay(), [0.5, 0.1, 0.6, 0.3], 200)
    assert traj.exit_step is None
    assert np.all(traj.states[1:] > 0)       # interior entry, probed


def test_lemma_edist():
    rep = lemma_edist_epsilon(euler_linear({"eps": 0.3}))
    assert rep.ok and rep.eps_dominance == pytest.approx(0.5)
    assert rep.eps_singular == pytest.approx(1 / math.sqrt(2))
    assert rep.eps_max < 1 / math.sqrt(2)
    assert not lemma_edist_epsilon(euler_linear({"eps": 0.6})).ok
    assert lemma_edist_epsilon(phosphorelay()).ok
    dense = euler_linear({"L": np.ones((3, 3)).tolist()})
    rep = lemma_edist_epsilon(dense)
    assert not rep.ok and rep.witness is not None
    with pytest.raises(ValueError):
        lemma_edist_epsilon(tanh_network())


def test_odts_certificates():
    c = certify_odts_order(tanh_network(), 1, trials=30, rng=0)
    assert c.verdict is Verdict.YES and c.method == "ClosedForm" and c.all_f_tp
    c = certify_odts_order(phosphorelay(), 3, trials=30, rng=0)
    assert c.verdict is Verdict.YES and c.method == "Oscillatory+Bound" and c.order_h == 3
    c = certify_odts_order(linear_tv(), 2, trials=5, rng=0)
    assert c.verdict is Verdict.YES and not c.all_f_tp
    c = certify_odts_order(linear_tv(), 1, trials=5, rng=0)
    assert c.verdict is Verdict.NO and c.counterexample is not None
    with pytest.raises(ValueError):
        certify_odts_order(linear_tv(), 0)


def test_variational_run_linear(rng):
    sys_ = linear_tv()
    a, b = np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.5])
    run = variational_run(sys_, a, b, 6)
    A = sys_.jacobian(0, a)
    np.testing.assert_allclose(run.z[6], np.linalg.matrix_power(A, 6) @ (b - a), rtol=1e-12)
    assert run.identity_residual < 1e-12
    with pytest.raises(ValueError):
        variational_run(sys_, a, a, 3)


@pytest.mark.parametrize("build,u,h,steps", [(tanh_network, 1, 1, 30), (phosphorelay, 24, 3, 144)])
def test_sign_chain_along_runs(rng, build, u, h, steps):
    sys_ = build()
    for _ in range(3):
        a, b = sys_.sample(rng), sys_.sample(rng)
        run = variational_run(sys_, a, b, steps)
        assert run.identity_residual < 1e-12
        assert run.resolved > u
        assert run.chain_holds(u)
        assert all(v is Verdict.YES for v in run.window_products_tp(u, h))
        assert all(np.linalg.det(P) > 0 for P in run.subsampled_products(u))


def test_eventual_monotonicity(rng):
    assert eventual_monotonicity_check([1, 2, 3]) == 0
    assert eventual_monotonicity_check([(-1) ** k for k in range(10)], window=2) is None
    assert eventual_monotonicity_check([-1, 1, 1, 1]) == 1
    assert eventual_monotonicity_check([1, 0]) is None
    sys_ = tanh_network()
    run = variational_run(sys_, sys_.sample(rng), sys_.sample(rng), 120)
    assert eventual_monotonicity_check(run.z[:run.resolved:12, 0]) is not None


def test_detect_period():
    const = np.ones((50, 2))
    assert detect_period(const, 6).detected_period == 1
    assert divisors(24) == [1, 2, 3, 4, 6, 8, 12, 24]
    with pytest.raises(ValueError):
        detect_period(const[:5], 6)
    X = np.array([[k % 4, 0.0] for k in range(40)])
    rep = detect_period(X, 8)
    assert rep.detected_period == 4 and rep.residuals[2] > 0
    noise = np.random.default_rng(0).random((60, 2))
    assert detect_period(noise, 6).detected_period is None


def test_reference_periods():
    tr = simulate(phosphorelay(), [0.5, 0.1, 0.6, 0.3], 336)
    rep = detect_period(tr, 24)
    assert rep.detected_period == 8 and 24 % rep.detected_period == 0
    tr = simulate(tanh_network(), [2.0, 3.0], 168)
    assert detect_period(tr, 12).detected_period == 12


def test_invariance_probe():
    assert invariant_set_probe(tanh_network(), 2000, rng=0).exits == 0
    assert invariant_set_probe(phosphorelay(), 2000, rng=0).exits == 0
    sys_ = tanh_network()
    shrunk = invariant_set_probe(sys_, 500, rng=0, lower=sys_.lower / 10, upper=sys_.upper / 10)
    assert shrunk.exits > 0 and shrunk.first_exit is not None
