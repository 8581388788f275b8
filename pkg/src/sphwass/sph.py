"""Summation density, the theta-parameterized particle accelerations,
neighbor search, and conservation/support diagnostics.

The acceleration of particle k is

    a_k = - sum_i m_i grad W_h(x_k - x_i) [F_theta(rho_k) + theta F_theta(rho_i)]
          - grad V(x_k) - eta(x_k) v_k + sum_i m_i K(x_k - x_i),

with the regularized density rho_k = sum_j m_j W_h(x_k - x_j) (the j = k
self-term included).  The i = k pressure term vanishes because
grad W_h(0) = 0, and the i = k interaction term because K(0) = 0.

Pairwise sums are evaluated in fixed index order over row blocks, so a
given state always produces bitwise-identical results.  All functions
here are pure; :class:`ParticleState` snapshots are never mutated.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .forces import f_theta

__all__ = [
    "ParticleState",
    "DensityField",
    "SupportDiagnostic",
    "compute_density",
    "compute_accelerations",
    "build_neighbor_lists",
    "momentum",
    "angular_momentum",
    "support_bound",
    "check_support",
]

# Row-block size for chunked pairwise evaluation: bounds peak memory at
# roughly block * n doubles per intermediate matrix.
_BLOCK = 512


@dataclass
class ParticleState:
    """Masses, positions, and velocities of n numerical particles.

    Positions and velocities have shape (n, d); masses (n,) with all
    entries positive.  When the state stands in for a probability
    measure the masses sum to one.
    """

    masses: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        self.masses = np.asarray(self.masses, dtype=float)
        self.positions = np.asarray(self.positions, dtype=float)
        self.velocities = np.asarray(self.velocities, dtype=float)
        if self.positions.ndim == 1:
            self.positions = self.positions[:, None]
        if self.velocities.ndim == 1:
            self.velocities = self.velocities[:, None]
        if self.masses.ndim != 1:
            raise ValueError("masses must be a 1-d array")
        n = self.masses.shape[0]
        if self.positions.shape[0] != n or self.velocities.shape[0] != n:
            raise ValueError("masses, positions, velocities must share length")
        if self.positions.shape != self.velocities.shape:
            raise ValueError("positions and velocities must share shape")
        if np.any(self.masses <= 0):
            raise ValueError("all particle masses must be positive")
        if not (np.all(np.isfinite(self.positions)) and np.all(np.isfinite(self.velocities))):
            raise ValueError("positions and velocities must be finite")

    @property
    def n(self):
        return self.masses.shape[0]

    @property
    def dim(self):
        return self.positions.shape[1]

    def copy(self):
        return ParticleState(
            self.masses.copy(), self.positions.copy(), self.velocities.copy(), self.time
        )


@dataclass
class DensityField:
    """Per-particle regularized density, with an optional gradient cache."""

    rho: np.ndarray
    grad_rho: np.ndarray | None = None


def _pairwise_sq_dists(x_block, x_all, sq_block, sq_all):
    """Squared distances |x_k - x_i|^2 via the inner-product expansion.

    Diagonal entries are exactly zero; cancellation noise is clipped at 0.
    """
    r2 = sq_block[:, None] + sq_all[None, :] - 2.0 * (x_block @ x_all.T)
    np.maximum(r2, 0.0, out=r2)
    return r2


def compute_density(state, kernel, method="auto"):
    """Summation density rho_i = sum_j m_j W_h(x_i - x_j), self-term included."""
    if state.dim != kernel.dim:
        raise ValueError(f"state dimension {state.dim} != kernel dimension {kernel.dim}")
    x, m = state.positions, state.masses
    if _use_cells(method, kernel, x, interaction=None):
        rho = _density_cells(x, m, kernel)
    else:
        rho = _density_all_pairs(x, m, kernel)
    return DensityField(rho=rho)


def _density_all_pairs(x, m, kernel):
    n = x.shape[0]
    sq = np.einsum("id,id->i", x, x)
    rho = np.empty(n)
    for s in range(0, n, _BLOCK):
        e = min(s + _BLOCK, n)
        r2 = _pairwise_sq_dists(x[s:e], x, sq[s:e], sq)
        rho[s:e] = kernel.value_from_sq(r2) @ m
    return rho


def compute_accelerations(state, density, fm, kernel, method="auto", include_drag=True):
    """Per-particle accelerations of the theta-parameterized scheme.

    ``density`` must come from :func:`compute_density` on the same state.
    ``include_drag=False`` omits the -eta(x) v term (the integrator folds
    drag into its half-kicks instead).  Returns an (n, d) array.
    """
    x, v, m = state.positions, state.velocities, state.masses

    if fm.eos is not None:
        F = np.asarray(f_theta(fm.eos, fm.theta, density.rho), dtype=float)
    else:
        F = None

    if _use_cells(method, kernel, x, fm.interaction):
        acc = _pressure_accel_cells(x, m, F, fm.theta, kernel)
    else:
        acc = _pressure_accel_all_pairs(x, m, F, fm.theta, kernel, fm.interaction)

    acc -= fm.grad_v(x)
    if include_drag:
        acc -= fm.eta_at(x)[:, None] * v
    return acc


def _pressure_accel_all_pairs(x, m, F, theta, kernel, interaction):
    """Chunked all-pairs pressure + interaction sums.

    Within a row block the pair sum  -sum_i w_ki (x_k - x_i)  is folded
    into two matrix products: (w @ x) - x_k * rowsum(w).
    """
    n = x.shape[0]
    sq = np.einsum("id,id->i", x, x)
    acc = np.zeros_like(x)
    for s in range(0, n, _BLOCK):
        e = min(s + _BLOCK, n)
        r2 = _pairwise_sq_dists(x[s:e], x, sq[s:e], sq)
        if F is not None:
            w = kernel.value_from_sq(r2)
            g = kernel.grad_scale_from_sq(r2, w)
            pw = m[None, :] * (F[s:e, None] + theta * F[None, :]) * g
            acc[s:e] += pw @ x - x[s:e] * pw.sum(axis=1)[:, None]
        if interaction is not None:
            c = interaction.force_scale(np.sqrt(r2)) * m[None, :]
            acc[s:e] += x[s:e] * c.sum(axis=1)[:, None] - c @ x
    return acc


def momentum(state):
    """Total linear momentum sum m_i v_i."""
    return state.masses @ state.velocities


def angular_momentum(state):
    """Total angular momentum about the origin (scalar in 2D, zero in 1D)."""
    if state.dim == 1:
        return 0.0
    if state.dim != 2:
        raise ValueError("angular momentum implemented for d in {1, 2}")
    x, v = state.positions, state.velocities
    return float(state.masses @ (x[:, 0] * v[:, 1] - x[:, 1] * v[:, 0]))


# ---------------------------------------------------------------------------
# neighbor search


def build_neighbor_lists(state, cutoff):
    """Indices j with |x_i - x_j| <= cutoff for every i (self included).

    Uses a uniform grid of cells of side ``cutoff``; candidates come from
    the 3^d adjacent cells and are filtered by exact distance.  Intended
    for compactly supported kernels; with unbounded kernels use all-pairs.
    """
    if cutoff <= 0:
        raise ValueError("cutoff must be positive")
    x = state.positions
    cells, cell_of = _grid_cells(x, cutoff)
    c2 = cutoff * cutoff
    out = []
    for i in range(state.n):
        cand = _cell_candidates(cells, cell_of[i], x.shape[1])
        d2 = np.einsum("jd,jd->j", x[cand] - x[i], x[cand] - x[i])
        out.append(np.sort(cand[d2 <= c2]))
    return out


def _grid_cells(x, cutoff):
    """Map integer cell coordinates to particle index arrays."""
    keys = np.floor(x / cutoff).astype(np.int64)
    cells = {}
    for i, key in enumerate(map(tuple, keys)):
        cells.setdefault(key, []).append(i)
    cells = {k: np.asarray(v, dtype=np.intp) for k, v in cells.items()}
    return cells, [tuple(k) for k in keys]


def _cell_candidates(cells, key, dim):
    offsets = np.stack(
        np.meshgrid(*([[-1, 0, 1]] * dim), indexing="ij"), axis=-1
    ).reshape(-1, dim)
    found = [
        cells[tuple(np.add(key, off))]
        for off in offsets
        if tuple(np.add(key, off)) in cells
    ]
    return np.concatenate(found) if found else np.empty(0, dtype=np.intp)


def _use_cells(method, kernel, x, interaction):
    if method == "all-pairs":
        return False
    if method == "cell-list":
        if not np.isfinite(kernel.support_radius):
            raise ValueError("cell lists require a compactly supported kernel")
        if interaction is not None:
            raise ValueError("cell lists cannot cover an unbounded interaction")
        return True
    if method != "auto":
        raise ValueError(f"unknown method {method!r}")
    if interaction is not None or not np.isfinite(kernel.support_radius):
        return False
    extent = (x.max(axis=0) - x.min(axis=0)).max() if x.size else 0.0
    # cells only pay off once several cells span the cloud
    return x.shape[0] >= 256 and extent > 4.0 * kernel.support_radius


def _density_cells(x, m, kernel):
    cutoff = kernel.support_radius
    cells, _ = _grid_cells(x, cutoff)
    sq = np.einsum("id,id->i", x, x)
    rho = np.zeros(x.shape[0])
    for key, idx in cells.items():
        cand = _cell_candidates(cells, key, x.shape[1])
        r2 = _pairwise_sq_dists(x[idx], x[cand], sq[idx], sq[cand])
        w = kernel.value_from_sq(r2)
        w[r2 > cutoff * cutoff] = 0.0
        rho[idx] = w @ m[cand]
    return rho


def _pressure_accel_cells(x, m, F, theta, kernel):
    cutoff = kernel.support_radius
    cells, _ = _grid_cells(x, cutoff)
    sq = np.einsum("id,id->i", x, x)
    acc = np.zeros_like(x)
    if F is None:
        return acc
    c2 = cutoff * cutoff
    for key, idx in cells.items():
        cand = _cell_candidates(cells, key, x.shape[1])
        r2 = _pairwise_sq_dists(x[idx], x[cand], sq[idx], sq[cand])
        w = kernel.value_from_sq(r2)
        g = kernel.grad_scale_from_sq(r2, w)
        g[r2 > c2] = 0.0
        pw = m[cand][None, :] * (F[idx][:, None] + theta * F[cand][None, :]) * g
        acc[idx] = pw @ x[cand] - x[idx] * pw.sum(axis=1)[:, None]
    return acc


# ---------------------------------------------------------------------------
# support diagnostics


@dataclass(frozen=True)
class SupportDiagnostic:
    """Constants of the a-priori support bound

        r(t) = r0 + t * v0_sup + 0.5 t^2 (M1 + grad_v_sup + k_sup).

    For theta = 1 the constants follow from the kernel and the pressure
    function: M2 = sup |F1| on [0, sup W], M1 = 2 M2 sup |grad W|.  For
    theta = 0 the driving bound M1 must be supplied by the caller.
    """

    r0: float
    v0_sup: float
    m1: float
    m2: float | None = None
    grad_v_sup: float = 0.0
    k_sup: float = 0.0

    @classmethod
    def for_theta1(cls, state, fm, kernel):
        """Derive the constants for the symmetrized scheme (theta = 1).

        Requires gamma >= 2 so that F1 is bounded on [0, sup W]; below
        that the constants do not exist and the diagnostic is disabled.
        """
        if fm.eos is None:
            m2 = 0.0
        elif fm.eos.gamma >= 2.0:
            m2 = fm.eos.k_eos * kernel.peak_value() ** (fm.eos.gamma - 2.0)
        else:
            warnings.warn(
                "support diagnostic disabled: F1 is unbounded near rho = 0 "
                f"for gamma = {fm.eos.gamma} < 2",
                RuntimeWarning,
            )
            return None
        m1 = 2.0 * m2 * kernel.grad_sup_norm()
        grad_v_sup = 0.0
        if fm.v_ext is not None:
            raise ValueError("supply grad_v_sup explicitly for nonzero potentials")
        k_sup = fm.interaction.sup_norm() if fm.interaction is not None else 0.0
        r0 = float(np.linalg.norm(state.positions, axis=1).max())
        v0_sup = float(np.linalg.norm(state.velocities, axis=1).max())
        return cls(r0=r0, v0_sup=v0_sup, m1=m1, m2=m2, grad_v_sup=grad_v_sup, k_sup=k_sup)


def support_bound(diag, t):
    """Radius r(t) outside of which no particle may travel."""
    return diag.r0 + t * diag.v0_sup + 0.5 * t * t * (diag.m1 + diag.grad_v_sup + diag.k_sup)


def check_support(state, bound):
    """True when every particle satisfies |x_i| <= bound."""
    return bool(np.linalg.norm(state.positions, axis=1).max() <= bound)
