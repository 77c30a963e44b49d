import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import CANONICAL
from weakpointer import (
    BoundaryLeak,
    Chirped,
    Cubic,
    Gaussian,
    GridSpec,
    InvalidInput,
    MomentumSkewed,
    NonNormalized,
    PointerState,
    Tabulated,
    build_pointer,
    initial_rates,
    stats,
)
from weakpointer.pointer import from_momentum, grid_from_positions, to_momentum


def test_grid_requires_power_of_two():
    with pytest.raises(InvalidInput):
        GridSpec(n_points=1000)
    with pytest.raises(InvalidInput):
        GridSpec(n_points=32)
    g = GridSpec(n_points=64, extent=10.0)
    assert g.dp == pytest.approx(2 * np.pi / 10.0)
    assert g.q[1] - g.q[0] == pytest.approx(10.0 / 64)


def test_momentum_transform_round_trip(grid):
    rng = np.random.default_rng(0)
    x = rng.normal(size=grid.n_points) + 1j * rng.normal(size=grid.n_points)
    assert np.allclose(from_momentum(grid, to_momentum(grid, x)), x, atol=1e-13)


def test_gaussian_unit_variance(pointers):
    s = stats(pointers["gaussian"], "q")
    assert pointers["gaussian"].norm() == pytest.approx(1.0, abs=1e-12)
    assert s.variance == pytest.approx(1.0, abs=1e-12)
    assert s.central3 == pytest.approx(0.0, abs=1e-12)


def test_gaussian_minimum_uncertainty_momentum(pointers):
    s = stats(pointers["gaussian"], "p")
    assert s.variance == pytest.approx(0.25, abs=1e-12)
    assert s.central3 == pytest.approx(0.0, abs=1e-12)


def test_chirp_leaves_position_density_alone(pointers):
    # frozen from oracles.position_moments / momentum_moments (quadrature)
    assert stats(pointers["chirped"], "q").variance == pytest.approx(1.0, abs=1e-12)
    assert stats(pointers["chirped"], "p").mean == pytest.approx(0.0, abs=1e-12)
    assert stats(pointers["chirped"], "p").variance == pytest.approx(0.5, abs=1e-12)


def test_momentum_skewed_closed_forms(pointers):
    s = stats(pointers["momentum_skewed"], "p")
    assert s.mean == pytest.approx(0.8, abs=1e-12)
    assert s.variance == pytest.approx(0.76, abs=1e-12)
    assert s.central3 == pytest.approx(0.064, abs=1e-12)
    assert (s.mean, s.variance, s.central3) == pytest.approx(
        oracles.skewed_momentum_moments(1.0, 0.5), abs=1e-12
    )


def test_cubic_mean_momentum(pointers):
    assert stats(pointers["cubic"], "p").mean == pytest.approx(0.15, abs=1e-12)


@pytest.mark.parametrize(
    "name,params",
    [("gaussian", {}), ("chirped", {"c": 0.25}), ("cubic", {"b": 0.05})],
)
def test_stats_match_quadrature_oracle(pointers, name, params):
    phi, dphi = oracles.gaussian_family(**params)
    _, mean, var, c3 = oracles.position_moments(phi)
    pm, pv = oracles.momentum_moments(phi, dphi)
    sq, sp = stats(pointers[name], "q"), stats(pointers[name], "p")
    assert (sq.mean, sq.variance, sq.central3) == pytest.approx((mean, var, c3), abs=1e-11)
    assert (sp.mean, sp.variance) == pytest.approx((pm, pv), abs=1e-11)


def test_tabulated_renormalized(grid, pointers):
    raw = pointers["chirped"].samples * np.sqrt(0.999999)
    s = build_pointer(Tabulated(raw), grid)
    assert s.norm() == pytest.approx(1.0, abs=1e-14)
    assert np.allclose(s.samples, pointers["chirped"].samples, atol=1e-14)


def test_pointer_state_rejects_unnormalized(grid, pointers):
    with pytest.raises(NonNormalized):
        PointerState(grid, 2 * pointers["gaussian"].samples)


def test_boundary_leak_flagged():
    with pytest.raises(BoundaryLeak):
        build_pointer(Gaussian(sigma=3.0), GridSpec(extent=20.0))


def test_grid_from_positions_round_trip(grid):
    g = grid_from_positions(grid.q, hbar=grid.hbar)
    assert g.n_points == grid.n_points
    assert g.extent == pytest.approx(grid.extent)
    assert g.center == pytest.approx(grid.center, abs=1e-12)


@pytest.mark.parametrize("name", list(CANONICAL))
def test_parseval(pointers, name):
    s = pointers[name]
    q_norm = np.sum(np.abs(s.samples) ** 2) * s.grid.dq
    p_norm = np.sum(np.abs(s.momentum_amplitudes()) ** 2) * s.grid.dp
    assert q_norm == pytest.approx(p_norm, abs=1e-12)


@pytest.mark.parametrize("name", list(CANONICAL))
@pytest.mark.parametrize("which", ["q", "p"])
def test_moment_bundle_invariants(pointers, name, which):
    m = stats(pointers[name], which)
    assert m.variance >= -1e-12
    assert m.variance == pytest.approx(m.raw2 - m.mean**2, abs=1e-12)
    scale = max(abs(m.raw3), abs(m.mean) * abs(m.raw2), abs(m.mean) ** 3, 1e-300)
    assert abs(m.central3 - (m.raw3 - 3 * m.mean * m.raw2 + 2 * m.mean**3)) <= 1e-10 * max(scale, 1.0)


@pytest.mark.parametrize("name", list(CANONICAL))
def test_stats_global_phase_invariant(pointers, name):
    s = pointers[name]
    rotated = s.with_samples(s.samples * np.exp(0.7j))
    for which in ("q", "p"):
        a, b = stats(s, which), stats(rotated, which)
        for f in ("mean", "raw2", "raw3", "variance", "central3"):
            x, y = getattr(a, f), getattr(b, f)
            assert abs(x - y) <= 1e-12 * max(1.0, abs(x))


@pytest.mark.parametrize("name", list(CANONICAL))
def test_discrete_translation_covariance(pointers, name):
    s = pointers[name]
    shifted = s.with_samples(np.roll(s.samples, 1))
    a, b = stats(s, "q"), stats(shifted, "q")
    assert b.mean - a.mean == pytest.approx(s.grid.dq, abs=1e-10)
    assert b.variance == pytest.approx(a.variance, abs=1e-10)
    assert b.central3 == pytest.approx(a.central3, abs=1e-10)


def test_gaussian_rates_vanish(pointers):
    r = initial_rates(pointers["gaussian"], 1.0)
    assert r.var_rate_q == pytest.approx(0.0, abs=1e-12)
    assert r.skew_rate_q == pytest.approx(0.0, abs=1e-12)


def test_chirped_rates(pointers):
    # analytic <{q,p}> = 4 hbar c sigma^2
    r = initial_rates(pointers["chirped"], 1.0)
    assert r.var_rate_q == pytest.approx(1.0, abs=1e-12)
    assert r.skew_rate_q == pytest.approx(0.0, abs=1e-12)
    phi, dphi = oracles.gaussian_family(c=0.25)
    assert r.anticom_qp == pytest.approx(oracles.anticommutator(phi, dphi, 1), abs=1e-11)


def test_cubic_rates(pointers):
    # analytic <{q^2,p}> = 18 b hbar sigma^4, <p> = 3 b hbar sigma^2
    r = initial_rates(pointers["cubic"], 1.0)
    assert r.var_rate_q == pytest.approx(0.0, abs=1e-12)
    assert r.skew_rate_q == pytest.approx(0.9, abs=1e-12)
    phi, dphi = oracles.gaussian_family(b=0.05)
    assert r.anticom_q2p == pytest.approx(oracles.anticommutator(phi, dphi, 2), abs=1e-11)


def test_rates_scale_inversely_with_mass(pointers):
    r1 = initial_rates(pointers["cubic"], 1.0)
    r2 = initial_rates(pointers["cubic"], 2.0)
    assert r2.skew_rate_q == pytest.approx(r1.skew_rate_q / 2, rel=1e-13)


@pytest.mark.parametrize("name", list(CANONICAL))
def test_rate_bundle_invariants(pointers, name):
    r = initial_rates(pointers[name], 1.3)
    m = r.mass
    assert r.var_rate_q == pytest.approx((r.anticom_qp - 2 * r.mean_q * r.mean_p) / m, abs=1e-12)
    skew = (1.5 / m) * r.anticom_q2p - (3 / m) * (r.mean_p * r.raw2_q + r.mean_q * r.anticom_qp) + (
        6 / m
    ) * r.mean_q**2 * r.mean_p
    assert r.skew_rate_q == pytest.approx(skew, abs=1e-12)


smooth_states = st.builds(
    dict,
    sigma=st.floats(0.6, 1.6),
    q0=st.floats(-3, 3),
    p0=st.floats(-3, 3),
    c=st.floats(-0.4, 0.4),
    b=st.floats(-0.06, 0.06),
)


def random_state(grid, sigma, q0, p0, c, b):
    q = grid.q
    raw = np.exp(-((q - q0) ** 2) / (4 * sigma**2) + 1j * (p0 * q + c * (q - q0) ** 2 + b * (q - q0) ** 3))
    return build_pointer(Tabulated(raw), grid)


@settings(max_examples=30, deadline=None)
@given(params=smooth_states)
def test_real_states_have_no_current(grid, params):
    q = grid.q
    real = np.exp(-((q - params["q0"]) ** 2) / (4 * params["sigma"] ** 2))
    s = build_pointer(Tabulated(real * np.exp(1.1j)), grid)
    r = initial_rates(s, 1.0)
    assert abs(r.anticom_qp - 2 * r.mean_q * r.mean_p) <= 1e-10
    assert abs(r.skew_rate_q) <= 1e-10


def test_momentum_family_built_in_momentum_space(grid):
    s = build_pointer(MomentumSkewed(s=2.0, lam=-0.3), grid)
    m1, var, c3 = oracles.skewed_momentum_moments(2.0, -0.3)
    p = stats(s, "p")
    assert (p.mean, p.variance, p.central3) == pytest.approx((m1, var, c3), abs=1e-11)


def test_unknown_family_rejected(grid):
    with pytest.raises(InvalidInput):
        build_pointer("gaussian", grid)


def test_families_are_hashable_specs():
    assert Chirped(1.0, 0.25) == Chirped(sigma=1.0, c=0.25)
    assert Cubic() != Cubic(b=0.1)
