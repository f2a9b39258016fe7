import numpy as np
import pytest

from abcpt.schedules import (check_temperatures, check_tolerances,
                             log_spaced_schedule, ring_index, ring_partition)

FIG3_LADDER = (0.025, 0.0342, 0.0468, 0.0639, 0.0874, 0.1196, 0.1635, 0.2236,
               0.3058, 0.4182, 0.5719, 0.7820, 1.0694, 1.4625, 2.0)


def test_toy_ladder_matches_published_values():
    eps = log_spaced_schedule(0.025, 2, 15)
    assert tuple(round(float(v), 4) for v in eps) == FIG3_LADDER
    assert eps[0] == 0.025 and eps[-1] == 2.0


def test_degenerate_and_small_schedules():
    assert np.array_equal(log_spaced_schedule(1, 1, 5), np.ones(5))
    assert np.allclose(log_spaced_schedule(1, 4, 3), [1, 2, 4])
    assert np.array_equal(log_spaced_schedule(0.7, 0.7, 1), [0.7])


@pytest.mark.parametrize("lo,hi,n", [(0, 1, 3), (-1, 1, 3), (1, 0.5, 3),
                                     (1, 2, 0), (1, 2, 1)])
def test_schedule_rejects_bad_inputs(lo, hi, n):
    with pytest.raises(ValueError):
        log_spaced_schedule(lo, hi, n)


def test_schedule_has_constant_ratio():
    gen = np.random.default_rng(0)
    for _ in range(50):
        lo = float(np.exp(gen.uniform(-8, 2)))
        hi = lo * float(np.exp(gen.uniform(0.01, 6)))
        n = int(gen.integers(2, 60))
        eps = log_spaced_schedule(lo, hi, n)
        ratios = eps[1:] / eps[:-1]
        assert np.max(np.abs(ratios / ratios[0] - 1)) < 1e-12


def test_tolerance_validation():
    eps = check_tolerances([0.1, 0.2, 0.5])
    assert not eps.flags.writeable
    with pytest.raises(ValueError):
        check_tolerances([0.2, 0.1])
    with pytest.raises(ValueError):
        check_tolerances([0.0, 0.1])
    with pytest.raises(ValueError):
        check_tolerances([0.1, 0.1, 0.2])


def test_temperature_validation():
    check_temperatures([1.0, 1.0, 4.0])
    with pytest.raises(ValueError):
        check_temperatures([2.0, 3.0])
    with pytest.raises(ValueError):
        check_temperatures([1.0, 0.5])
    with pytest.raises(ValueError):
        check_temperatures([1.0, 2.0], n_chains=3)


def test_ring_partition_reproduces_published_boundaries():
    bounds = ring_partition(log_spaced_schedule(0.025, 2, 15), 3)
    assert tuple(round(float(b), 4) for b in bounds) == (0.0, 0.1035, 0.4950, 2.0)
    # published values carry 3 decimals
    assert abs(bounds[1] - 0.103) < 1e-3
    assert abs(bounds[2] - 0.495) < 1e-3


def test_ring_partition_edges():
    eps = log_spaced_schedule(0.025, 2, 15)
    assert np.array_equal(ring_partition(eps, 1), [0.0, 2.0])
    assert np.allclose(ring_partition([1.0, 2.0, 4.0], 3), [0.0, 1.5, 3.0, 4.0])
    with pytest.raises(ValueError):
        ring_partition(eps, 16)
    with pytest.raises(ValueError):
        ring_partition(eps, 0)


def test_ring_partition_remainder_goes_to_low_groups():
    # N=7, K=3: group sizes 3, 2, 2
    eps = np.arange(1.0, 8.0)
    bounds = ring_partition(eps, 3)
    assert np.allclose(bounds, [0.0, 3.5, 5.5, 7.0])


def test_every_tolerance_lies_in_exactly_one_ring():
    gen = np.random.default_rng(3)
    for _ in range(40):
        n = int(gen.integers(2, 40))
        k = int(gen.integers(1, n + 1))
        eps = np.sort(np.exp(gen.uniform(-5, 2, size=n)))
        if np.any(np.diff(eps) <= 0):
            continue
        bounds = ring_partition(eps, k)
        assert bounds[0] == 0.0 and bounds[-1] == eps[-1]
        assert np.all(np.diff(bounds) > 0)
        rings = [ring_index(float(e), bounds) for e in eps]
        sizes = np.bincount(rings, minlength=k)
        base, extra = divmod(n, k)
        assert list(sizes) == [base + 1] * extra + [base] * (k - extra)


def test_ring_index_boundary_rules():
    bounds = [0.0, 0.1035, 0.4950, 2.0]
    assert ring_index(0.0, bounds) == 0
    assert ring_index(0.2, bounds) == 1
    assert ring_index(0.1035, bounds) == 0  # boundary belongs to the lower ring
    assert ring_index(0.4950, bounds) == 1
    assert ring_index(2.0, bounds) == 2
    with pytest.raises(ValueError):
        ring_index(2.1, bounds)
    with pytest.raises(ValueError):
        ring_index(-0.1, bounds)
