import math
import warnings

import numpy as np
import pytest

from wignerdamp.grid import WignerField
from wignerdamp.kernels import CorrelationKernel
from wignerdamp.observables import density, moments
from wignerdamp.potential import Barrier
from wignerdamp.solver import (BoundaryWarning, GridClipsPacketError, NonFiniteFieldError, SimulationConfig,
                               SplittingSolver, initial_wigner, run)


def small(**kw):
    """Coarse but well-resolved setup: position std 1, momentum std 0.5."""
    base = dict(E_K=0.5, sigma0=0.5, hbar=1.0, x0=-12.0, x_min=-40.0, x_max=40.0, n_x=256,
                p_min=-3.0, p_max=5.0, n_p=128, dt=0.05, t_final=1.0, snapshot_times=())
    base.update(kw)
    return SimulationConfig(**base)


def test_initial_field_normalised_and_peaked():
    cfg = small(x0=-12.5)  # on the lattice
    f = initial_wigner(cfg)
    assert f.norm() == pytest.approx(1.0, abs=1e-14)
    i = np.argmin(np.abs(f.grid.x - cfg.x_start))
    j = np.argmin(np.abs(f.grid.p - cfg.p0))
    assert f.grid.x[i] == pytest.approx(cfg.x_start) and f.grid.p[j] == pytest.approx(cfg.p0)
    assert f.values[i, j] == pytest.approx(1 / (math.pi * cfg.hbar), rel=1e-9)


def test_initial_moments_example():
    # E_K = 0.5, sigma0 = 0.05, hbar = 1: sigma20 = 100, sigma02 = 0.0025
    cfg = SimulationConfig(E_K=0.5, hbar=1.0, x0=0.0, x_min=-100, x_max=100, n_x=512,
                           p_min=0.0, p_max=2.0, n_p=128)
    m = moments(initial_wigner(cfg))
    assert m.x_avg == pytest.approx(0.0, abs=1e-10)
    assert m.p_avg == pytest.approx(1.0, rel=1e-12)
    assert m.sigma11 == pytest.approx(0.0, abs=1e-10)
    assert m.sigma02 == pytest.approx(0.0025, rel=1e-10)
    assert m.sigma20 == pytest.approx(100.0, rel=1e-10)


def test_clipping_is_rejected():
    with pytest.raises(GridClipsPacketError, match="grid clips initial packet"):
        initial_wigner(small(x0=-37.0))


def test_auto_x0():
    cfg = SimulationConfig(hbar=0.7)
    assert cfg.x0 is None
    assert cfg.x_start == pytest.approx(-35.0)
    assert SimulationConfig(hbar=0.7, barrier=Barrier(8.0)).x_start == pytest.approx(-40.0)
    assert SimulationConfig(hbar=0.7, E_K=0.25).x_start == pytest.approx(-70.0)


def test_n_steps_must_divide():
    with pytest.raises(ValueError, match="multiple"):
        small(t_final=1.03).n_steps


def test_drift_properties():
    cfg = small(barrier=Barrier.flat())
    s = SplittingSolver(cfg)
    f = initial_wigner(cfg)
    out = s.drift_half_step(f, 0.2)
    j0 = int(np.argmin(np.abs(s.grid.p)))
    assert s.grid.p[j0] == 0.0
    np.testing.assert_allclose(out.values[:, j0], f.values[:, j0], atol=1e-15)
    m0, m1 = moments(f), moments(out)
    assert m1.x_avg - m0.x_avg == pytest.approx(m0.p_avg * 0.1, abs=1e-10)
    assert out.norm() == pytest.approx(f.norm(), abs=1e-14)
    assert out.time == pytest.approx(0.1)


def test_free_transport_variance():
    cfg = small(barrier=Barrier.flat(), x0=-5.0)
    s = SplittingSolver(cfg)
    f = initial_wigner(cfg)
    m0 = moments(f)
    out = f
    for _ in range(20):
        out = s.drift_half_step(out, 1.0)
    m = moments(out)
    assert out.time == pytest.approx(10.0)
    assert m.sigma20 == pytest.approx(m0.sigma20 + 2 * m0.sigma11 * 10 + m0.sigma02 * 100, abs=1e-8)


def test_flat_coherent_kick_is_identity_and_strang_is_drift():
    cfg = small(barrier=Barrier.flat())
    s = SplittingSolver(cfg)
    f = initial_wigner(cfg)
    assert s.kick_multiplier(cfg.dt) is None
    np.testing.assert_array_equal(s.kick_step(f, cfg.dt).values, f.values)
    np.testing.assert_allclose(s.strang_step(f, cfg.dt).values, s.drift(f.values, cfg.dt), atol=1e-15)


def test_collision_kick_density_and_variance():
    cfg = small(barrier=Barrier.flat(), kernel=CorrelationKernel.sech(4.0), tau=3.0, p_min=-7, p_max=9, n_p=256)
    s = SplittingSolver(cfg)
    f = initial_wigner(cfg)
    out = s.kick_step(f, 0.1)
    np.testing.assert_allclose(density(out), density(f), atol=1e-12)
    growth = moments(out).sigma02 - moments(f).sigma02
    first_order = cfg.hbar ** 2 / 4.0 ** 2 * 0.1 / 3.0
    assert growth == pytest.approx(first_order, rel=0.02)


def test_kick_multiplier_is_contractive():
    cfg = small(kernel=CorrelationKernel.sech(2.0))
    m = SplittingSolver(cfg).kick_multiplier(0.1)
    assert np.abs(m).max() <= 1.0 + 1e-15


def test_barrier_kick_keeps_density():
    cfg = small(kernel=CorrelationKernel.sech(4.0), x0=-3.0)
    s = SplittingSolver(cfg)
    rng = np.random.default_rng(5)
    f = WignerField(s.grid, rng.normal(size=s.grid.shape))
    np.testing.assert_allclose(density(s.kick_step(f, 0.3)), density(f), atol=1e-12)


@pytest.mark.parametrize("kernel", [CorrelationKernel.coherent(), CorrelationKernel.sech(4.0)], ids=lambda k: k.label)
def test_fusion_matches_unfused(kernel):
    cfg = small(kernel=kernel, x0=-6.0)
    s = SplittingSolver(cfg)
    f = initial_wigner(cfg)
    a = s.evolve(f, cfg.dt, 7, fuse=True)
    b = s.evolve(f, cfg.dt, 7, fuse=False)
    assert np.abs(a.values - b.values).max() < 1e-12
    assert a.time == pytest.approx(b.time)


def test_run_matches_evolve():
    cfg = small(kernel=CorrelationKernel.sech(4.0), x0=-6.0, record_every=3, snapshot_times=(0.5,))
    res = run(cfg)
    ref = SplittingSolver(cfg).evolve(initial_wigner(cfg), cfg.dt, cfg.n_steps)
    assert np.abs(res.final.values - ref.values).max() < 1e-12


def test_zero_final_time_returns_initial_moments():
    cfg = small(t_final=0.0)
    res = run(cfg)
    assert len(res.moments) == 1
    assert res.moments[0] == moments(initial_wigner(cfg))


def test_records_observers_and_snapshots():
    cfg = small(t_final=1.0, snapshot_times=(0.25, 1.0), record_every=4)
    seen, snaps = [], []
    res = run(cfg, observers=[lambda step, f: seen.append(step)],
              snapshot_observers=[lambda step, f: snaps.append(f.time)])
    assert seen == [0, 4, 5, 8, 12, 16, 20]
    assert snaps == pytest.approx([0.25, 1.0])
    assert sorted(res.snapshots) == [0.25, 1.0]
    assert res.times[-1] == pytest.approx(1.0)


def test_norm_conserved_with_barrier_and_collisions():
    cfg = small(kernel=CorrelationKernel.sech(2.0), x0=-6.0, t_final=5.0, E_K=1.0, p_min=-5, p_max=7, n_p=256)
    res = run(cfg)
    assert np.abs(res.series("norm") - 1.0).max() < 1e-10


def test_p_avg_invariant_under_collisions():
    cfg = small(barrier=Barrier.flat(), kernel=CorrelationKernel.sech(3.0), t_final=3.0,
                x0=-10.0, p_min=-7, p_max=9, n_p=256)
    res = run(cfg)
    assert np.abs(res.series("p_avg") - cfg.p0).max() < 1e-8


def test_uncertainty_bound_under_coherent_scattering():
    cfg = small(E_K=0.5, x0=-8.0, t_final=12.0, dt=0.1, record_every=5, n_p=256, p_min=-5, p_max=5)
    res = run(cfg)
    prod = res.series("sigma20") * res.series("sigma02")
    assert prod.min() >= cfg.hbar ** 2 / 4 - 1e-6


def test_non_finite_field_aborts():
    cfg = small()
    bad = initial_wigner(cfg)
    bad.values[3, 3] = np.nan
    with pytest.raises(NonFiniteFieldError, match="step 0"):
        run(cfg, initial=bad)


def test_boundary_warning():
    cfg = small(barrier=Barrier.flat(), x0=25.0, t_final=10.0, dt=0.1, E_K=2.0, p_min=-2, p_max=6)
    with pytest.warns(BoundaryWarning, match="enlarge the domain"):
        res = run(cfg)
    assert res.boundary_warning_time is not None and res.boundary_warning_time < 10.0
    assert len(res.warnings) == 1
