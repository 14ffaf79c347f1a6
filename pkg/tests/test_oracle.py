import math

import numpy as np
import pytest

from wignerdamp.kernels import CorrelationKernel
from wignerdamp.observables import moments
from wignerdamp.oracle import (NonRealTransformError, flat_potential_moments, fokker_planck_gaussian,
                               schrodinger_run, wigner_grid, wigner_transform, gaussian_packet)
from wignerdamp.potential import Barrier
from wignerdamp.solver import SimulationConfig, initial_wigner, run


def free_config(**kw):
    base = dict(E_K=0.5, sigma0=0.5, hbar=1.0, x0=-10.0, x_min=-40.0, x_max=40.0, n_x=512,
                p_min=-4.0, p_max=6.0, n_p=128, dt=0.05, t_final=10.0, barrier=Barrier.flat(), snapshot_times=())
    base.update(kw)
    return SimulationConfig(**base)


def test_free_schrodinger_ehrenfest_and_spreading():
    cfg = free_config()
    tr = schrodinger_run(cfg, times=[0.0, 5.0, 10.0])
    for t, psi in zip(tr.times, tr.psi):
        rho = np.abs(psi) ** 2
        assert rho.sum() * tr.dx == pytest.approx(1.0, abs=1e-12)
        xm = (tr.x * rho).sum() * tr.dx
        var = ((tr.x - xm) ** 2 * rho).sum() * tr.dx
        assert xm == pytest.approx(cfg.x_start + cfg.p0 * t, abs=1e-8)
        assert var == pytest.approx(cfg.position_std ** 2 + cfg.momentum_std ** 2 * t ** 2, abs=1e-6)


def test_schrodinger_rejects_decoherent_kernel():
    with pytest.raises(ValueError, match="coherent"):
        schrodinger_run(free_config(kernel=CorrelationKernel.sech(4)))


def test_transform_of_packet_is_initial_wigner():
    cfg = free_config()
    g = wigner_grid(cfg.x_min, cfg.n_x, cfg.grid.dx, cfg.hbar)
    psi = gaussian_packet(cfg, g.x)
    psi /= math.sqrt(np.sum(np.abs(psi) ** 2) * g.dx)
    w = wigner_transform(psi, g.x_min, g.dx, cfg.hbar)
    assert w.norm() == pytest.approx(1.0, abs=1e-12)
    ref_cfg = cfg.replace(p_min=g.p_min, p_max=g.p_max, n_p=g.n_p)
    ref = initial_wigner(ref_cfg)
    assert np.abs(w.values - ref.values).max() < 1e-8


def test_transform_shift_covariance():
    cfg = free_config()
    g = wigner_grid(cfg.x_min, cfg.n_x, cfg.grid.dx, cfg.hbar)
    psi = gaussian_packet(cfg, g.x)
    a = wigner_transform(psi, g.x_min, g.dx, cfg.hbar)
    b = wigner_transform(np.roll(psi, 7), g.x_min, g.dx, cfg.hbar)
    np.testing.assert_allclose(b.values, np.roll(a.values, 7, axis=0), atol=1e-12)


def test_transform_rejects_broken_symmetry():
    rng = np.random.default_rng(3)
    psi = rng.normal(size=64) + 1j * rng.normal(size=64)
    # a wavefunction always gives a real transform; a tight tolerance on a
    # noisy state exposes round-off, a negative one forces the error path
    with pytest.raises(NonRealTransformError, match="non-real transform"):
        wigner_transform(psi, 0.0, 0.1, 1.0, rtol=-1.0)


def test_flat_moment_examples():
    cfg = free_config()
    m0 = flat_potential_moments(cfg, 0.0)
    assert m0.sigma20 == pytest.approx(cfg.position_std ** 2) and m0.sigma02 == pytest.approx(0.25)
    m = flat_potential_moments(cfg, 10.0)
    assert m.sigma20 == pytest.approx(m0.sigma20 + m0.sigma02 * 100)
    assert m.x_avg == pytest.approx(cfg.x_start + 10 * cfg.p0)
    sech = cfg.replace(kernel=CorrelationKernel.sech(4.0), tau=3.0)
    assert flat_potential_moments(sech, 30.0).sigma02 == pytest.approx(m0.sigma02 + 0.625)
    assert flat_potential_moments(sech, 0.0) == flat_potential_moments(cfg, 0.0)
    with pytest.raises(ValueError, match="flat potential"):
        flat_potential_moments(cfg.replace(barrier=Barrier(1.0)), 1.0)


def test_flat_moments_match_solver():
    cfg = free_config(kernel=CorrelationKernel.sech(4.0), tau=3.0, t_final=6.0, p_min=-6, p_max=8, n_p=256)
    res = run(cfg)
    ref = flat_potential_moments(cfg, 6.0, initial=res.moments[0])
    m = res.moments[-1]
    for name in ("x_avg", "p_avg", "sigma20", "sigma02", "sigma11"):
        assert getattr(m, name) == pytest.approx(getattr(ref, name), rel=5e-3)


def test_fokker_planck_gaussian_normalised():
    cfg = free_config(kernel=CorrelationKernel.quadratic(1 / 32), tau=3.0)
    f = fokker_planck_gaussian(cfg, 2.0)
    assert f.sum() * cfg.grid.cell == pytest.approx(1.0, abs=1e-10)
    assert moments(cfg.grid and __import__("wignerdamp").WignerField(cfg.grid, f)).sigma02 == pytest.approx(
        flat_potential_moments(cfg, 2.0).sigma02, rel=1e-8)


def test_coherent_barrier_agrees_with_schrodinger():
    # The barrier scatters weak momentum tails well past the incident packet;
    # p within 8 and dx near 0.16 are needed to resolve them at this tolerance.
    cfg = SimulationConfig(E_K=0.8, sigma0=0.4, hbar=1.0, x0=-8.0, x_min=-60.0, x_max=60.0, n_x=768,
                           p_min=-8.0, p_max=8.0, n_p=1024, dt=0.05, t_final=12.0, record_every=20,
                           snapshot_times=())
    res = run(cfg)
    tr = schrodinger_run(cfg, times=res.times)
    g = cfg.grid
    for rec, psi in zip(res.moments, tr.psi):
        ref = moments(wigner_transform(psi, g.x_min, g.dx, cfg.hbar, rec.t))
        for name in ("x_avg", "p_avg", "sigma20", "sigma02", "sigma11"):
            assert getattr(rec, name) == pytest.approx(getattr(ref, name), abs=1e-6)
