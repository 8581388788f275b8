import numpy as np
import pytest

from sphwass import (
    EosPolytropic,
    ForceModel,
    Gaussian1D,
    IntegratorConfig,
    ParticleState,
    QuadraticPotential,
    SimulationDivergedError,
    WendlandCubic2D,
    angular_momentum,
    momentum,
    run,
    step,
)

FREE = ForceModel(theta=1)
KERNEL_1D = Gaussian1D(1.0)


def single_particle(x0, v0, dim=1):
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    v0 = np.atleast_1d(np.asarray(v0, dtype=float))
    return ParticleState([1.0], x0[None, :], v0[None, :])


class TestStep:
    def test_free_particle_drifts(self):
        state = single_particle(0.0, 1.0)
        out = step(state, FREE, KERNEL_1D, dt=0.1)
        assert out.positions[0, 0] == pytest.approx(0.1, rel=1e-15)
        assert out.velocities[0, 0] == pytest.approx(1.0, rel=1e-15)
        assert out.time == pytest.approx(0.1)

    def test_pure_drag_matches_trapezoidal_closed_form(self):
        # per step the scheme multiplies v by (1 - eta dt/2)/(1 + eta dt/2)
        eta, dt, n_steps = 10.0, 1e-2, 100
        fm = ForceModel(theta=1, eta=eta)
        state = single_particle(0.0, 1.0)
        for _ in range(n_steps):
            state = step(state, fm, KERNEL_1D, dt)
        factor = (1.0 - 0.5 * eta * dt) / (1.0 + 0.5 * eta * dt)
        assert state.velocities[0, 0] == pytest.approx(factor**n_steps, rel=1e-12)

    def test_pure_drag_second_order_against_exponential(self):
        # relative error vs exp(-eta t) shrinks by ~4 when dt halves
        eta, t_end = 10.0, 1.0
        errors = []
        for dt in (1e-2, 5e-3, 2.5e-3):
            n_steps = int(round(t_end / dt))
            factor = (1.0 - 0.5 * eta * dt) / (1.0 + 0.5 * eta * dt)
            v = factor**n_steps
            errors.append(abs(v - np.exp(-eta * t_end)) / np.exp(-eta * t_end))
        orders = [np.log2(errors[i] / errors[i + 1]) for i in range(2)]
        assert all(1.8 <= order <= 2.2 for order in orders)

    def test_drag_stable_for_large_eta_dt(self):
        # update factor has magnitude <= 1 for every eta * dt
        for eta_dt in (0.1, 1.0, 10.0, 1e3):
            factor = (1.0 - 0.5 * eta_dt) / (1.0 + 0.5 * eta_dt)
            assert abs(factor) <= 1.0
        fm = ForceModel(theta=1, eta=1e3)
        state = single_particle(0.0, 1.0)
        for _ in range(50):
            state = step(state, fm, KERNEL_1D, dt=1.0)
        assert abs(state.velocities[0, 0]) <= 1.0


class TestHarmonicOscillator:
    FM = ForceModel(theta=1, v_ext=QuadraticPotential())

    def run_harmonic(self, dt, t_end=1.0):
        cfg = IntegratorConfig(dt=dt, t_end=t_end, snapshot_times=(t_end,))
        traj = run(single_particle(1.0, 0.0), self.FM, KERNEL_1D, cfg)
        return traj.states[-1]

    def test_energy_error_small(self):
        final = self.run_harmonic(1e-3)
        energy = 0.5 * final.velocities[0, 0] ** 2 + 0.5 * final.positions[0, 0] ** 2
        assert abs(energy - 0.5) <= 1e-5

    def test_position_second_order_convergence(self):
        exact = np.cos(1.0)
        errors = [abs(self.run_harmonic(dt).positions[0, 0] - exact)
                  for dt in (4e-3, 2e-3, 1e-3)]
        orders = [np.log2(errors[i] / errors[i + 1]) for i in range(2)]
        assert all(1.8 <= order <= 2.2 for order in orders)


class TestTwoParticleConvergence:
    def final_position(self, dt):
        state = ParticleState([0.5, 0.5], [[0.0], [1.0]], [[0.0], [0.0]])
        fm = ForceModel(theta=1, eos=EosPolytropic(gamma=7.0))
        cfg = IntegratorConfig(dt=dt, t_end=1.0, snapshot_times=(1.0,))
        return run(state, fm, KERNEL_1D, cfg).states[-1].positions[:, 0]

    def test_halving_dt_quarters_error(self):
        # Richardson reference from the finest run
        reference = self.final_position(1e-3 / 4)
        err_coarse = np.abs(self.final_position(4e-3) - reference).max()
        err_fine = np.abs(self.final_position(2e-3) - reference).max()
        ratio = err_coarse / err_fine
        assert 4.0 * 0.85 <= ratio <= 4.0 * 1.15


class TestRun:
    def test_zero_time_returns_initial_state(self):
        state = single_particle(0.3, -0.2)
        cfg = IntegratorConfig(dt=0.1, t_end=0.0)
        traj = run(state, FREE, KERNEL_1D, cfg)
        assert len(traj) == 1
        np.testing.assert_array_equal(traj.states[0].positions, state.positions)
        np.testing.assert_array_equal(traj.states[0].velocities, state.velocities)

    def test_snapshots_at_nearest_step_multiples(self):
        state = single_particle(0.0, 1.0)
        cfg = IntegratorConfig(dt=1e-3, t_end=1.0,
                               snapshot_times=tuple(j / 9 for j in range(10)))
        traj = run(state, FREE, KERNEL_1D, cfg)
        assert len(traj) == 10
        for req, got in zip((j / 9 for j in range(10)), traj.times):
            assert abs(got - req) <= 0.5e-3 + 1e-12
            assert got == pytest.approx(round(got / 1e-3) * 1e-3, abs=1e-12)

    def test_momentum_drift_over_1000_steps(self, random_state_factory):
        # theta = 1, conservative-only forces
        state = random_state_factory(16, 2, vel_scale=0.2)
        state.velocities += 0.5  # nonzero bulk momentum
        state = ParticleState(state.masses, state.positions, state.velocities)
        fm = ForceModel(theta=1, eos=EosPolytropic(gamma=7.0))
        kernel = WendlandCubic2D(1.0)
        cfg = IntegratorConfig(dt=1e-3, t_end=1.0, snapshot_times=(1.0,))
        p0 = momentum(state)
        l0 = angular_momentum(state)
        final = run(state, fm, kernel, cfg).states[-1]
        assert np.abs(momentum(final) - p0).max() <= 1e-12 * np.abs(p0).max()
        assert abs(angular_momentum(final) - l0) <= 1e-10 * max(abs(l0), 1.0)

    def test_time_reversibility_without_drag(self):
        state = ParticleState([0.5, 0.5], [[0.0], [1.0]], [[0.1], [-0.3]])
        fm = ForceModel(theta=1, eos=EosPolytropic(gamma=7.0))
        cfg = IntegratorConfig(dt=1e-3, t_end=0.5, snapshot_times=(0.5,))
        fwd = run(state, fm, KERNEL_1D, cfg).states[-1]
        back_start = ParticleState(fwd.masses, fwd.positions, -fwd.velocities)
        back = run(back_start, fm, KERNEL_1D, cfg).states[-1]
        np.testing.assert_allclose(back.positions, state.positions, atol=1e-8)

    def test_determinism_bitwise(self, random_state_factory):
        state = random_state_factory(12, 2)
        fm = ForceModel(theta=1, eos=EosPolytropic(gamma=7.0), eta=0.3)
        kernel = WendlandCubic2D(1.0)
        cfg = IntegratorConfig(dt=1e-2, t_end=0.3, snapshot_times=(0.15, 0.3))
        t1 = run(state.copy(), fm, kernel, cfg)
        t2 = run(state.copy(), fm, kernel, cfg)
        for s1, s2 in zip(t1.states, t2.states):
            np.testing.assert_array_equal(s1.positions, s2.positions)
            np.testing.assert_array_equal(s1.velocities, s2.velocities)

    def test_divergence_raises_with_step_index(self):
        # wildly unstable dt for the harmonic trap overflows to inf
        fm = ForceModel(theta=1, v_ext=QuadraticPotential())
        cfg = IntegratorConfig(dt=100.0, t_end=100000.0)
        with np.errstate(over="ignore", invalid="ignore"):
            with pytest.raises(SimulationDivergedError) as exc_info:
                run(single_particle(1.0, 0.0), fm, KERNEL_1D, cfg)
        assert exc_info.value.step_index >= 1
        assert str(exc_info.value.step_index) in str(exc_info.value)


class TestConfigValidation:
    def test_rejects_bad_dt(self):
        with pytest.raises(ValueError):
            IntegratorConfig(dt=0.0, t_end=1.0)

    def test_rejects_negative_t_end(self):
        with pytest.raises(ValueError):
            IntegratorConfig(dt=0.1, t_end=-1.0)

    def test_rejects_out_of_range_snapshots(self):
        with pytest.raises(ValueError):
            IntegratorConfig(dt=0.1, t_end=1.0, snapshot_times=(2.0,))
