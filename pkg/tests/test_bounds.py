import numpy as np
import pytest

from lvpatch.bounds import (
    RegionEstimate,
    check_dispersal_bound,
    draw_initial_states,
    estimate_ultimate_bounds,
)
from lvpatch.coeffs import QuasiPeriodicCoefficient as QPC
from lvpatch.integrator import integrate_batch
from lvpatch.model import SystemParams

# seed 42, ensemble 16, ic_box (0.1, 5), burn-in 100, horizon 300, margin 5 %, rk4 h = 1e-3
GOLDEN_LOWER = [0.8651161623426032, 0.7241508524607294, 0.7526084720235972, 0.62578794767453]
GOLDEN_UPPER = [1.582851315220082, 1.4134008689951278, 1.4051850599187663, 1.0477692963151244]


def test_dispersal_example51(ex51):
    rep = check_dispersal_bound(ex51)
    assert rep.holds
    lhs = [q.lhs for q in rep.inequalities]
    rhs = [q.rhs for q in rep.inequalities]
    np.testing.assert_allclose(lhs, [1.2, 1.4, 1.2, 1.4], atol=1e-15)
    np.testing.assert_allclose(rhs, [4.0, 4.2, 3.0, 3.4], atol=1e-15)
    np.testing.assert_allclose(rep.margins, [2.8, 2.8, 1.8, 2.0], atol=1e-12)


def test_dispersal_failure_margin(ex51):
    rep = check_dispersal_bound(ex51.with_coefficients(D1=QPC.const(5.0), r1=QPC.const(1.0)))
    first = rep.inequalities[0]
    assert not first.holds and first.margin == -4.0
    assert not rep.holds


def test_dispersal_zero_diffusion():
    p = SystemParams.constant(r1=1, r2=1, s1=1, s2=1)
    assert check_dispersal_bound(p).holds


def test_initial_state_stream_is_frozen():
    z = draw_initial_states(42, 2, (0.1, 5.0))
    np.testing.assert_array_equal(z[0], [4.118970924518349, 1.0273035580236294,
                                         4.351537992922516, 2.0334492043853296])
    assert np.all((z > 0.1) & (z < 5.0))


def test_region_golden_and_deterministic(ex51, ex51_region):
    np.testing.assert_allclose(ex51_region.lower, GOLDEN_LOWER, rtol=1e-9)
    np.testing.assert_allclose(ex51_region.upper, GOLDEN_UPPER, rtol=1e-9)
    assert np.all(ex51_region.lower > 0)
    again = estimate_ultimate_bounds(ex51, seed=42)
    assert again == ex51_region


def test_logistic_carrying_capacity():
    p = SystemParams.constant(r1=1.0, a11=1.0)
    reg = estimate_ultimate_bounds(p, seed=3, ensemble_size=4, burn_in=100, horizon=120)
    assert reg.xL[0] == pytest.approx(0.95, abs=1e-9)
    assert reg.xM[0] == pytest.approx(1.05, abs=1e-9)


def test_margin_zero_is_observed_min():
    p = SystemParams.constant(r1=2, r2=2, s1=2, s2=2, a11=1, a12=0.5, a21=0.5, a22=1,
                              b11=1, b12=0.5, b21=0.5, b22=1, D1=0.3, D2=0.3)
    ics = [[0.5, 2.0, 1.5, 0.7], [1.8, 0.3, 0.6, 2.2]]
    reg = estimate_ultimate_bounds(p, initial_states=ics, burn_in=1.0, horizon=5.0, margin=0.0)
    np.testing.assert_array_equal(reg.lower, reg.observed_min_state)
    wider = estimate_ultimate_bounds(p, initial_states=ics, burn_in=1.0, horizon=5.0, margin=0.1)
    assert np.all(wider.lower < reg.lower) and np.all(wider.upper > reg.upper)


def test_region_contains_fresh_trajectories(ex51, ex51_region):
    fresh = draw_initial_states(7, 4, (0.1, 5.0))
    for tr in integrate_batch(ex51, fresh, 0.0, 200.0):
        assert np.all(ex51_region.contains(tr.z[tr.t >= 100.0]))


def test_region_invariant():
    with pytest.raises(ValueError):
        RegionEstimate((0.0, 1.0), (2.0, 2.0), (1.0, 1.0), (2.0, 2.0))
    with pytest.raises(ValueError):
        RegionEstimate((1.0, 1.0), (0.5, 2.0), (1.0, 1.0), (2.0, 2.0))


def test_estimator_argument_checks(ex51):
    with pytest.raises(ValueError):
        estimate_ultimate_bounds(ex51, burn_in=10, horizon=5)
    with pytest.raises(ValueError):
        estimate_ultimate_bounds(ex51, ensemble_size=0)
