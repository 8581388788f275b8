"""Fixed-step leapfrog (kick-drift-kick) time integration.

Linear drag receives special treatment so that the pure-drag subproblem
is integrated by the trapezoidal closed form: the first half-kick applies
drag explicitly,

    v <- v (1 - dt/2 eta(x)) + dt/2 a(x),

and the second half-kick implicitly,

    v <- (v + dt/2 a(x')) / (1 + dt/2 eta(x')),

where a(x) collects pressure, external-potential, and interaction terms
(everything except drag).  With all non-drag forces zero the velocity is
multiplied per step by (1 - dt eta/2)/(1 + dt eta/2), the exact
trapezoidal factor: second-order accurate against exp(-eta t) and
contractive for every dt * eta.  With eta = 0 the scheme is the plain
symplectic leapfrog.
"""

from dataclasses import dataclass

import numpy as np

from .sph import ParticleState, compute_accelerations, compute_density

__all__ = ["IntegratorConfig", "Trajectory", "SimulationDivergedError", "step", "run"]


class SimulationDivergedError(RuntimeError):
    """Raised when positions or velocities become non-finite mid-run."""

    def __init__(self, step_index, message=None):
        self.step_index = step_index
        super().__init__(message or f"simulation diverged at step {step_index}")


@dataclass(frozen=True)
class IntegratorConfig:
    """Time step, final time, and requested output times.

    Snapshot times are realized at the nearest step multiple of ``dt``
    (requested grids need not divide ``dt`` exactly).
    """

    dt: float
    t_end: float
    snapshot_times: tuple = ()

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.t_end < 0:
            raise ValueError(f"t_end must be nonnegative, got {self.t_end}")
        snaps = tuple(float(t) for t in self.snapshot_times)
        if any(t < 0 or t > self.t_end + 0.5 * self.dt for t in snaps):
            raise ValueError("snapshot times must lie within [0, t_end]")
        object.__setattr__(self, "snapshot_times", snaps)

    def snapshot_steps(self):
        """Snapshot step indices, deduplicated and sorted.

        An empty request means a single snapshot of the final state.
        """
        n_steps = int(round(self.t_end / self.dt))
        if not self.snapshot_times:
            return [n_steps], n_steps
        idx = {min(int(round(t / self.dt)), n_steps) for t in self.snapshot_times}
        return sorted(idx), n_steps


@dataclass
class Trajectory:
    """Snapshots of a single run: realized times and matching states."""

    times: list
    states: list

    def __len__(self):
        return len(self.times)


def _nodrag_accel(state, fm, kernel, method):
    density = compute_density(state, kernel, method=method)
    acc = compute_accelerations(
        state, density, fm, kernel, method=method, include_drag=False
    )
    return acc, density


def step(state, fm, kernel, dt, method="auto"):
    """One kick-drift-kick step; returns a new state at time t + dt."""
    a0, _ = _nodrag_accel(state, fm, kernel, method)
    eta0 = fm.eta_at(state.positions)[:, None]
    v_half = state.velocities * (1.0 - 0.5 * dt * eta0) + 0.5 * dt * a0
    x_new = state.positions + dt * v_half
    moved = ParticleState(state.masses, x_new, v_half, state.time)
    a1, _ = _nodrag_accel(moved, fm, kernel, method)
    eta1 = fm.eta_at(x_new)[:, None]
    v_new = (v_half + 0.5 * dt * a1) / (1.0 + 0.5 * dt * eta1)
    return ParticleState(state.masses, x_new, v_new, state.time + dt)


def run(state0, fm, kernel, cfg, method="auto"):
    """Integrate from ``state0`` and collect snapshots at the configured times.

    Raises :class:`SimulationDivergedError` (naming the step) if the state
    leaves the realm of finite floats.
    """
    snap_steps, n_steps = cfg.snapshot_steps()
    want = set(snap_steps)
    times, states = [], []

    m = state0.masses.copy()
    x = state0.positions.copy()
    v = state0.velocities.copy()
    t0 = state0.time

    def record(k, xs, vs):
        times.append(t0 + k * cfg.dt)
        states.append(ParticleState(m, xs.copy(), vs.copy(), t0 + k * cfg.dt))

    a, _ = _nodrag_accel(state0, fm, kernel, method)
    if 0 in want:
        record(0, x, v)
    for k in range(1, n_steps + 1):
        eta0 = fm.eta_at(x)[:, None]
        v = v * (1.0 - 0.5 * cfg.dt * eta0) + 0.5 * cfg.dt * a
        x = x + cfg.dt * v
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(v))):
            raise SimulationDivergedError(k)
        probe = ParticleState(m, x, v, t0 + k * cfg.dt)
        a, _ = _nodrag_accel(probe, fm, kernel, method)
        eta1 = fm.eta_at(x)[:, None]
        v = (v + 0.5 * cfg.dt * a) / (1.0 + 0.5 * cfg.dt * eta1)
        if not np.all(np.isfinite(v)):
            raise SimulationDivergedError(k)
        if k in want:
            record(k, x, v)
    return Trajectory(times=times, states=states)
