"""Force ingredients: equation of state, external potential, drag, and
the regularized Morse interaction.

The pressure enters the particle equations through a pair of functions
derived from a polytropic equation of state ``P(rho) = k_eos * rho**gamma``
(internal energy satisfies ``de/drho = P / rho**2``):

* ``theta = 1`` uses ``F1(rho) = k_eos * rho**(gamma - 2)``, the bare
  derivative of the specific internal energy;
* ``theta = 0`` uses ``F0(rho) = (1/rho) d/drho(rho**2 F1(rho))
  = gamma * k_eos * rho**(gamma - 2)``, which folds the full pressure
  gradient into a single factor.

For ``gamma = 2`` both are constant (``F0 = 2 k_eos``, ``F1 = k_eos``) and
the two particle schemes coincide.
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "EosPolytropic",
    "MorseInteraction",
    "QuadraticPotential",
    "ForceModel",
    "SingularDensityError",
    "f_theta",
    "morse_force",
    "external_accel",
]


class SingularDensityError(ValueError):
    """Raised when the pressure function is evaluated at rho = 0 with gamma < 2."""


@dataclass(frozen=True)
class EosPolytropic:
    """Polytropic equation of state P = k_eos * rho**gamma."""

    gamma: float
    k_eos: float = 1.0

    def __post_init__(self):
        if self.gamma <= 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if self.k_eos <= 0:
            raise ValueError(f"k_eos must be positive, got {self.k_eos}")


def f_theta(eos, theta, rho):
    """Pressure function F_theta(rho) for the scheme switch theta in {0, 1}.

    theta=1 returns ``k_eos * rho**(gamma-2)``; theta=0 returns
    ``gamma * k_eos * rho**(gamma-2)``.  For gamma < 2 the exponent is
    negative and rho = 0 raises :class:`SingularDensityError`.
    """
    if theta not in (0, 1):
        raise ValueError(f"theta must be 0 or 1, got {theta}")
    rho = np.asarray(rho, dtype=float)
    expo = eos.gamma - 2.0
    if expo < 0 and np.any(rho <= 0.0):
        raise SingularDensityError(
            f"F_theta singular: rho = 0 encountered with gamma = {eos.gamma} < 2"
        )
    out = eos.k_eos * rho**expo
    if theta == 0:
        out = eos.gamma * out
    return out if out.ndim else float(out)


def _smoothstep(u):
    """Quintic smoothstep s(u) = u^3 (10 - 15 u + 6 u^2) on [0, 1]."""
    return u * u * u * (10.0 + u * (-15.0 + 6.0 * u))


@dataclass(frozen=True)
class MorseInteraction:
    """Pairwise force from a Morse potential, tapered to zero at the origin.

    The potential is ``U(r) = c_r exp(-r/l_r) - c_a exp(-r/l_a)`` (repulsion
    positive) and the force on a particle at displacement ``x`` from the
    source is ``K(x) = -U'(|x|) (x/|x|) psi(|x|)``, where ``psi`` is a
    quintic smoothstep in ``r / r_cut`` below ``r_cut`` and one beyond.
    The taper gives a bounded, continuously differentiable force with
    ``K(0) = 0`` exactly, so self-interactions cancel.
    """

    c_a: float = 2.0
    c_r: float = 1.5
    l_a: float = 1.0
    l_r: float = 2.0
    r_cut: float = 0.1

    def __post_init__(self):
        for name in ("c_a", "c_r", "l_a", "l_r", "r_cut"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")

    def u_prime(self, r):
        """Radial derivative of the (untapered) potential."""
        r = np.asarray(r, dtype=float)
        return (self.c_a / self.l_a) * np.exp(-r / self.l_a) - (
            self.c_r / self.l_r
        ) * np.exp(-r / self.l_r)

    def force_scale(self, r):
        """Scalar c(r) such that K(x) = c(|x|) * x, with c(0) = 0."""
        r = np.asarray(r, dtype=float)
        taper = np.where(
            r < self.r_cut, _smoothstep(np.minimum(r / self.r_cut, 1.0)), 1.0
        )
        with np.errstate(divide="ignore", invalid="ignore"):
            c = np.where(r > 0.0, -self.u_prime(r) * taper / np.where(r > 0, r, 1.0), 0.0)
        return c

    def force(self, x):
        """Force vector(s) K(x) for displacement(s) x of shape (..., d)."""
        x = np.asarray(x, dtype=float)
        r = np.sqrt(np.einsum("...d,...d->...", x, x))
        c = self.force_scale(r)
        return np.asarray(c)[..., None] * x

    def sup_norm(self, r_max=None, n_samples=200001):
        """Sampled sup of |K| over radii in [0, r_max] (dense grid)."""
        if r_max is None:
            r_max = 20.0 * max(self.l_a, self.l_r)
        r = np.linspace(0.0, r_max, n_samples)
        taper = np.where(r < self.r_cut, _smoothstep(r / self.r_cut), 1.0)
        return float(np.abs(self.u_prime(r) * taper).max())


def morse_force(interaction, x):
    """Module-level alias for :meth:`MorseInteraction.force`."""
    return interaction.force(x)


@dataclass(frozen=True)
class QuadraticPotential:
    """External potential V(y) = 0.5 * k * |y - center|^2."""

    k: float = 1.0
    center: tuple = ()

    def _offset(self, y):
        if not self.center:
            return y
        return y - np.asarray(self.center, dtype=float)

    def value(self, y):
        d = self._offset(np.asarray(y, dtype=float))
        return 0.5 * self.k * np.einsum("...d,...d->...", d, d)

    def gradient(self, y):
        return self.k * self._offset(np.asarray(y, dtype=float))


@dataclass(frozen=True)
class ForceModel:
    """Everything the motion equation needs besides the kernel.

    Parameters
    ----------
    theta : int
        Scheme switch; 1 is the symmetrized pairwise pressure form, 0 the
        direct discretization of the continuum pressure gradient.
    eos : EosPolytropic or None
        Pressure law; None disables the pressure term entirely (pure
        interaction/drag problems).
    v_ext : object or None
        External potential exposing ``gradient(y)``; None means zero.
    eta : float or callable
        Drag coefficient, a nonnegative constant or a field ``eta(y)``
        returning per-particle values.
    interaction : MorseInteraction or None
        Pairwise interaction kernel; None disables it.
    """

    theta: int = 1
    eos: EosPolytropic | None = None
    v_ext: object = None
    eta: object = 0.0
    interaction: MorseInteraction | None = None

    def __post_init__(self):
        if self.theta not in (0, 1):
            raise ValueError(f"theta must be 0 or 1, got {self.theta}")
        if not callable(self.eta) and self.eta < 0:
            raise ValueError("eta must be nonnegative")

    def eta_at(self, y):
        """Drag coefficient per position, broadcast against y's rows."""
        if callable(self.eta):
            return np.asarray(self.eta(y), dtype=float)
        return np.full(np.asarray(y).shape[0], float(self.eta))

    def grad_v(self, y):
        if self.v_ext is None:
            return np.zeros_like(np.asarray(y, dtype=float))
        return np.asarray(self.v_ext.gradient(y), dtype=float)


def external_accel(fm, y, u):
    """Acceleration from the external potential and drag: -grad V(y) - eta(y) u.

    The pairwise interaction is handled by the summation core, not here.
    """
    y = np.atleast_2d(np.asarray(y, dtype=float))
    u = np.atleast_2d(np.asarray(u, dtype=float))
    a = -fm.grad_v(y) - fm.eta_at(y)[:, None] * u
    return a
