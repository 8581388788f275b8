"""Experiment drivers: the three built-in families and the convergence
study that compares particle solutions across a resolution ladder.

Families
--------
``expansion_1d``
    Spontaneous expansion of a gas initially uniform on [0, 1], Gaussian
    kernel, polytropic pressure, no other forces; n = 2**k particles.
``rotating_square_2d``
    Expansion of an initially uniform square [0, 1]^2 with rigid initial
    rotation (vx, vy) = (-y, x), Wendland kernel; n = 4**k particles.
``morse_2d``
    Pure interaction/drag problem: regularized Morse forces plus linear
    drag, no pressure; n = 4**k particles released at rest.

A study runs every resolution of the ladder from an independently
constructed initial state, evaluates the Wasserstein-1 distance between
consecutive runs on a shared snapshot grid, takes the max over the grid,
and converts consecutive maxima into convergence rates.
"""

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .forces import EosPolytropic, ForceModel, MorseInteraction
from .initial import equipartition, preset, sample_iid, select_h
from .integrator import IntegratorConfig, SimulationDivergedError, run
from .kernels import Gaussian1D, WendlandCubic2D
from .sph import SupportDiagnostic, check_support, compute_density, support_bound
from .transport import (
    DiscreteMeasure,
    convergence_rates,
    sup_wasserstein_over_time,
)

__all__ = [
    "ExperimentPlan",
    "DensityProfile",
    "RunRecord",
    "StudyResult",
    "StudyDivergedError",
    "run_convergence_study",
    "density_profile",
    "emit_report",
    "FAMILIES",
]

FAMILIES = {
    "expansion_1d": {"dim": 1, "preset": "uniform_box_1d", "pressure": True},
    "rotating_square_2d": {"dim": 2, "preset": "rotating_square_2d", "pressure": True},
    "morse_2d": {"dim": 2, "preset": "morse_cloud_2d", "pressure": False},
}


class StudyDivergedError(RuntimeError):
    """A simulation in the study diverged; carries the offending run."""

    def __init__(self, family, k, step_index):
        self.family = family
        self.k = k
        self.step_index = step_index
        super().__init__(
            f"simulation diverged in family {family!r} at resolution k={k} "
            f"(step {step_index})"
        )


@dataclass(frozen=True)
class ExperimentPlan:
    """Full description of one convergence study.

    ``resolutions`` is the ladder of exponents k; the particle count is
    2**k in one dimension and 4**k in two.  ``h_mode`` is ``'fixed'``
    (h = h_value for every resolution) or ``'scaled'``
    (h = h_value * V0**(1/d)).  Runs with gamma < 2 are permitted but
    flagged as outside the assumptions backing the a-priori bounds.
    """

    family: str
    resolutions: tuple
    gamma: float = 2.0
    kappa: float = 1.0
    theta: int = 1
    h_mode: str = "fixed"
    h_value: float = 1.0
    dt: float = 1e-3
    t_end: float = 1.0
    n_snapshots: int = 10
    eta: float = 0.0
    morse: MorseInteraction | None = None
    init_mode: str = "equipartition"
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        ks = tuple(int(k) for k in self.resolutions)
        if len(ks) < 2:
            raise ValueError("need at least two resolutions to compare")
        if any(k < 1 for k in ks) or any(b <= a for a, b in zip(ks, ks[1:])):
            raise ValueError("resolutions must be strictly increasing and >= 1")
        object.__setattr__(self, "resolutions", ks)
        if self.theta not in (0, 1):
            raise ValueError("theta must be 0 or 1")
        if self.n_snapshots < 2:
            raise ValueError("need at least two snapshot times")
        if FAMILIES[self.family]["pressure"] and self.gamma <= 0:
            raise ValueError("gamma must be positive")
        if self.h_mode not in ("fixed", "scaled"):
            raise ValueError("h_mode must be 'fixed' or 'scaled'")
        if self.dt <= 0 or self.t_end <= 0:
            raise ValueError("dt and t_end must be positive")
        if self.eta < 0:
            raise ValueError("eta must be nonnegative")
        if self.init_mode not in ("equipartition", "iid"):
            raise ValueError("init_mode must be 'equipartition' or 'iid'")

    @property
    def dim(self):
        return FAMILIES[self.family]["dim"]

    def particles_at(self, k):
        return (2**k) ** self.dim

    def snapshot_times(self):
        nr = self.n_snapshots
        return tuple(j * self.t_end / (nr - 1) for j in range(nr))

    def force_model(self):
        fam = FAMILIES[self.family]
        if fam["pressure"]:
            eos = EosPolytropic(gamma=self.gamma, k_eos=self.kappa)
            return ForceModel(theta=self.theta, eos=eos, eta=self.eta)
        morse = self.morse if self.morse is not None else MorseInteraction()
        return ForceModel(theta=self.theta, eos=None, eta=self.eta, interaction=morse)

    def outside_assumption_coverage(self):
        """True for pressure runs with gamma < 2 (bounds unavailable)."""
        return FAMILIES[self.family]["pressure"] and self.gamma < 2.0


@dataclass
class RunRecord:
    """One resolution of a study: its setup and snapshot trajectory."""

    k: int
    n: int
    h: float
    trajectory: object
    support_ok: list | None
    support_radii: list | None
    final_max_speed: float


@dataclass
class StudyResult:
    plan: ExperimentPlan
    runs: list
    snapshot_times: np.ndarray
    pair_distances: list
    sup_distances: np.ndarray
    argmax_times: np.ndarray
    rate_table: object


def _single_run(plan, k):
    fam = FAMILIES[plan.family]
    n = plan.particles_at(k)
    spec = preset(fam["preset"], n)
    if plan.init_mode == "equipartition":
        state0 = equipartition(spec)
    else:
        state0 = sample_iid(spec, seed=plan.seed + k)
    h = select_h(spec, plan.h_mode, plan.h_value)
    kernel = Gaussian1D(h) if plan.dim == 1 else WendlandCubic2D(h)
    fm = plan.force_model()
    cfg = IntegratorConfig(
        dt=plan.dt, t_end=plan.t_end, snapshot_times=plan.snapshot_times()
    )
    try:
        traj = run(state0, fm, kernel, cfg)
    except SimulationDivergedError as err:
        raise StudyDivergedError(plan.family, k, err.step_index) from err

    support_ok = support_radii = None
    if plan.theta == 1 and (fm.eos is None or fm.eos.gamma >= 2.0):
        diag = SupportDiagnostic.for_theta1(state0, fm, kernel)
        if diag is not None:
            support_radii = [support_bound(diag, t) for t in traj.times]
            support_ok = [
                check_support(s, r) for s, r in zip(traj.states, support_radii)
            ]
    vmax = float(np.linalg.norm(traj.states[-1].velocities, axis=1).max())
    return RunRecord(
        k=k,
        n=n,
        h=h,
        trajectory=traj,
        support_ok=support_ok,
        support_radii=support_radii,
        final_max_speed=vmax,
    )


def run_convergence_study(plan, workers=1, budget=None):
    """Run every resolution of the plan and assemble distances and rates.

    Resolutions are independent; ``workers > 1`` runs them in separate
    processes.  Any diverging simulation aborts the study with a
    :class:`StudyDivergedError` naming the family and resolution.
    """
    ks = list(plan.resolutions)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(_single_run, [plan] * len(ks), ks))
    else:
        runs = [_single_run(plan, k) for k in ks]

    times = np.asarray(runs[0].trajectory.times)
    kwargs = {} if budget is None else {"budget": budget}
    pair_distances, sups, argmaxes = [], [], []
    for lo, hi in zip(runs, runs[1:]):
        snaps_lo = [
            (t, DiscreteMeasure.from_state(s))
            for t, s in zip(lo.trajectory.times, lo.trajectory.states)
        ]
        snaps_hi = [
            (t, DiscreteMeasure.from_state(s))
            for t, s in zip(hi.trajectory.times, hi.trajectory.states)
        ]
        sup, argmax_t, dists = sup_wasserstein_over_time(snaps_lo, snaps_hi, **kwargs)
        pair_distances.append(dists)
        sups.append(sup)
        argmaxes.append(argmax_t)

    table = convergence_rates(sups, plan.dim, resolutions=ks)
    return StudyResult(
        plan=plan,
        runs=runs,
        snapshot_times=times,
        pair_distances=pair_distances,
        sup_distances=np.asarray(sups),
        argmax_times=np.asarray(argmaxes),
        rate_table=table,
    )


@dataclass
class DensityProfile:
    """Regularized density evaluated on a grid of probe points."""

    grid: np.ndarray
    values: np.ndarray


def density_profile(state, kernel, grid):
    """Kernel-regularized density rho(xi) = sum_j m_j W_h(xi - x_j) on a grid."""
    grid = np.asarray(grid, dtype=float)
    pts = grid[:, None] if grid.ndim == 1 else grid
    if pts.shape[1] != state.dim:
        raise ValueError("grid dimension does not match the state")
    values = np.empty(pts.shape[0])
    block = 2048
    x = state.positions
    for s in range(0, pts.shape[0], block):
        diff = pts[s : s + block, None, :] - x[None, :, :]
        r2 = np.einsum("gjd,gjd->gj", diff, diff)
        values[s : s + block] = kernel.value_from_sq(r2) @ state.masses
    return DensityProfile(grid=grid, values=values)


def _fmt(x):
    return f"{x:.17g}"


def emit_report(result, outdir, config=None):
    """Write rate tables, per-time distances, snapshots, and a manifest.

    Layout under ``outdir``:

    * ``rates.csv`` -- header ``family,k,n,W_k_kplus1,C_rate``; one row per
      consecutive resolution pair, the rate attached to the row of the
      pair whose ratio defines it (blank for the first pair).
    * ``distances.csv`` -- per-snapshot-time distances for every pair.
    * ``snapshots_k<k>.csv`` -- ``t,id,x0..,v0..,rho`` per run.
    * ``cloud_final_k<k>.csv`` -- ``id,x0..,mass`` point cloud at the
      final snapshot (the format read back by the distance command).
    * ``manifest.json`` -- the resolved configuration, re-runnable as is.
    """
    os.makedirs(outdir, exist_ok=True)
    plan = result.plan
    dim = plan.dim

    rows = []
    table = result.rate_table
    for p, (k_lo, k_hi) in enumerate(zip(table.resolutions, table.resolutions[1:])):
        rate = ""
        if p >= 1 and np.isfinite(table.rates[p - 1]):
            rate = _fmt(table.rates[p - 1])
        rows.append(
            f"{plan.family},{k_lo},{plan.particles_at(k_lo)},"
            f"{_fmt(result.sup_distances[p])},{rate}"
        )
    with open(os.path.join(outdir, "rates.csv"), "w") as fh:
        fh.write("family,k,n,W_k_kplus1,C_rate\n")
        fh.write("\n".join(rows) + "\n")

    with open(os.path.join(outdir, "distances.csv"), "w") as fh:
        fh.write("family,k,k_next,t,W\n")
        for p, (k_lo, k_hi) in enumerate(zip(table.resolutions, table.resolutions[1:])):
            for t, w in zip(result.snapshot_times, result.pair_distances[p]):
                fh.write(f"{plan.family},{k_lo},{k_hi},{_fmt(t)},{_fmt(w)}\n")

    for rec in result.runs:
        kernel = Gaussian1D(rec.h) if dim == 1 else WendlandCubic2D(rec.h)
        snap_path = os.path.join(outdir, f"snapshots_k{rec.k}.csv")
        xcols = ",".join(f"x{i}" for i in range(dim))
        vcols = ",".join(f"v{i}" for i in range(dim))
        with open(snap_path, "w") as fh:
            fh.write(f"t,id,{xcols},{vcols},rho\n")
            for t, state in zip(rec.trajectory.times, rec.trajectory.states):
                rho = compute_density(state, kernel).rho
                for pid in range(state.n):
                    xs = ",".join(_fmt(v) for v in state.positions[pid])
                    vs = ",".join(_fmt(v) for v in state.velocities[pid])
                    fh.write(f"{_fmt(t)},{pid},{xs},{vs},{_fmt(rho[pid])}\n")
        final = rec.trajectory.states[-1]
        with open(os.path.join(outdir, f"cloud_final_k{rec.k}.csv"), "w") as fh:
            fh.write(f"id,{xcols},mass\n")
            for pid in range(final.n):
                xs = ",".join(_fmt(v) for v in final.positions[pid])
                fh.write(f"{pid},{xs},{_fmt(final.masses[pid])}\n")

    if config is not None:
        with open(os.path.join(outdir, "manifest.json"), "w") as fh:
            json.dump(config, fh, indent=2, sort_keys=True)
            fh.write("\n")
