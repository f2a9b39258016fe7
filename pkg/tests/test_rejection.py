import numpy as np
import pytest
from scipy import stats
from scipy.integrate import quad

from abcpt import RejectionCapError, RejectionSampler, abc_rejection
from abcpt.toy import toy_hit_probability
from conftest import fresh_stream


def test_huge_tolerance_recovers_the_prior(toy_model):
    samples, used = abc_rejection(toy_model, 1e6, 3000, fresh_stream(0))
    assert used == 3000  # every proposal lands inside the tolerance
    assert stats.kstest(samples[:, 0], stats.uniform(-10, 20).cdf).pvalue > 0.01


def test_acceptance_rate_matches_quadrature_oracle(toy_model):
    # oracle first: integral of prior times hit probability
    prob, _ = quad(lambda t: toy_hit_probability(t, 0.025) / 20.0, -10, 10,
                   epsabs=1e-13, limit=400, points=[-1, 0, 1, 4, 5, 6])
    n_proposals = 10**5
    rng = fresh_stream(42)
    accepted = 0
    for _ in range(n_proposals):
        theta = toy_model.prior_sample(rng)
        z = toy_model.simulate(theta, rng)
        if abs(z) < 0.025:
            accepted += 1
    se = np.sqrt(prob * (1 - prob) / n_proposals)
    assert abs(accepted / n_proposals - prob) < 3 * se


def test_requested_count_is_returned(toy_model):
    samples, used = abc_rejection(toy_model, 0.5, 50, fresh_stream(1))
    assert samples.shape == (50, 1)
    assert used >= 50


def test_attempt_cap_raises(toy_model):
    with pytest.raises(RejectionCapError):
        abc_rejection(toy_model, 1e-7, 10, fresh_stream(2), max_attempts=200)


@pytest.mark.parametrize("epsilon,count", [(0.0, 5), (-1.0, 5), (0.5, 0)])
def test_invalid_arguments(toy_model, epsilon, count):
    with pytest.raises(ValueError):
        abc_rejection(toy_model, epsilon, count, fresh_stream(3))


def test_estimator_front(toy_model):
    est = RejectionSampler(model=toy_model, epsilon=0.5, n_samples=400,
                           random_state=9).fit()
    assert est.samples_.shape == (400, 1)
    assert 0 < est.acceptance_rate_ <= 1
    assert est.get_params()["epsilon"] == 0.5
    # same seed, same draws
    again = RejectionSampler(model=toy_model, epsilon=0.5, n_samples=400,
                             random_state=9).fit()
    assert np.array_equal(est.samples_, again.samples_)


def test_fit_with_observed_dataset_override(toy_model):
    est = RejectionSampler(model=toy_model, epsilon=0.05, n_samples=300,
                           random_state=3).fit(X=5.0)
    # posterior given x=5 concentrates near 5 and near 10 (shifted mixture)
    assert abs(np.median(est.samples_[np.abs(est.samples_[:, 0] - 5) < 2]) - 5) < 0.5
