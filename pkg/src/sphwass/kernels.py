"""Smoothing kernels.

Two families are provided:

* :class:`Gaussian1D` -- the one-dimensional Gaussian

  .. math:: W_h(x) = \\frac{1}{h\\sqrt{\\pi}}\\, e^{-x^2/h^2},

  which is analytically normalized and has unbounded support.

* :class:`WendlandCubic2D` -- the two-dimensional cubic Wendland function

  .. math:: W_h(x) = \\sigma\\,(1 + 3|x|/2h)\\,(2 - |x|/h)^3
            \\quad\\text{for } |x| \\le 2h,

  and zero outside.  The shape integrates to ``6.4 pi h^2`` over the
  plane, so the unit-integral normalization constant is
  ``sigma = 1 / (6.4 pi h^2)``.  (A bare ``1/8`` prefactor, sometimes
  seen for this shape, does not normalize it in 2D; pass ``norm_const``
  explicitly to reproduce that convention.)

Both kernels are nonnegative, even, and integrate to one; gradients are
analytic and vanish at the origin.  Instances are immutable after
construction and safe for concurrent reads.
"""

import numpy as np

__all__ = ["Gaussian1D", "WendlandCubic2D"]

SQRT_PI = np.sqrt(np.pi)

# Shape integral of (1 + 3q/2)(2 - q)^3 * 2*pi*q over q in [0, 2] is 6.4*pi;
# dividing by it makes the 2D Wendland integrate to one.
_WENDLAND_SHAPE_INTEGRAL = 6.4 * np.pi


class Gaussian1D:
    """Gaussian smoothing kernel on the real line.

    Parameters
    ----------
    h : float
        Smoothing length, must be positive.
    cutoff_radius : float, optional
        If given, the kernel is truncated to zero beyond this radius.
        Off by default: the analysis assumes full support, and the
        truncated kernel no longer integrates exactly to one.
    """

    dim = 1

    def __init__(self, h, cutoff_radius=None):
        if h <= 0:
            raise ValueError(f"smoothing length must be positive, got h={h}")
        if cutoff_radius is not None and cutoff_radius <= 0:
            raise ValueError("cutoff_radius must be positive when given")
        self.h = float(h)
        self.cutoff_radius = None if cutoff_radius is None else float(cutoff_radius)
        self.norm_const = 1.0 / (self.h * SQRT_PI)

    @property
    def support_radius(self):
        """Radius beyond which the kernel vanishes (inf if untruncated)."""
        return np.inf if self.cutoff_radius is None else self.cutoff_radius

    def value_from_sq(self, r2):
        """Kernel value as a function of squared distance."""
        r2 = np.asarray(r2, dtype=float)
        w = self.norm_const * np.exp(-r2 / (self.h * self.h))
        if self.cutoff_radius is not None:
            w = np.where(r2 <= self.cutoff_radius**2, w, 0.0)
        return w

    def grad_scale_from_sq(self, r2, w=None):
        """Scalar g(r^2) such that grad W(x) = g(|x|^2) * x.

        The kernel value at the same points may be passed to avoid
        recomputing the exponential.
        """
        if w is None:
            w = self.value_from_sq(r2)
        return -2.0 * w / (self.h * self.h)

    def value(self, x):
        x = np.asarray(x, dtype=float)
        r2 = _squared_radius(x, self.dim)
        return self.value_from_sq(r2)

    def gradient(self, x):
        x = np.asarray(x, dtype=float)
        r2 = _squared_radius(x, self.dim)
        g = self.grad_scale_from_sq(r2)
        return g * x if x.shape == r2.shape else g[..., None] * x

    def peak_value(self):
        """sup W = W(0)."""
        return self.norm_const

    def grad_sup_norm(self):
        """sup |W'|, attained at x = h/sqrt(2)."""
        return np.sqrt(2.0) * np.exp(-0.5) / (SQRT_PI * self.h * self.h)

    def normalization_residual(self, n_nodes=80):
        """|integral of W - 1| by Gauss-Hermite quadrature."""
        u, wts = np.polynomial.hermite.hermgauss(n_nodes)
        # substitute x = h*u: integral = sum w_i * exp(u^2) * W(h u) * h
        vals = np.exp(u * u) * self.value_from_sq((self.h * u) ** 2) * self.h
        return abs(float(wts @ vals) - 1.0)


class WendlandCubic2D:
    """Compactly supported cubic Wendland kernel in the plane.

    Parameters
    ----------
    h : float
        Smoothing length; the support radius is ``2 h``.
    norm_const : float, optional
        Override the normalization prefactor.  The default,
        ``1 / (6.4 pi h^2)``, makes the kernel integrate to one.
    """

    dim = 2

    def __init__(self, h, norm_const=None):
        if h <= 0:
            raise ValueError(f"smoothing length must be positive, got h={h}")
        self.h = float(h)
        if norm_const is None:
            norm_const = 1.0 / (_WENDLAND_SHAPE_INTEGRAL * self.h * self.h)
        self.norm_const = float(norm_const)

    @property
    def support_radius(self):
        return 2.0 * self.h

    def value_from_sq(self, r2):
        r2 = np.asarray(r2, dtype=float)
        q = np.sqrt(r2) / self.h
        t = np.maximum(2.0 - q, 0.0)
        return self.norm_const * (1.0 + 1.5 * q) * t * t * t

    def grad_scale_from_sq(self, r2, w=None):
        """Scalar g(r^2) such that grad W(x) = g(|x|^2) * x.

        dW/dr = -6 sigma r (2 - r/h)^2 / h^2, so g = -6 sigma (2-q)^2 / h^2
        with no singularity at the origin.
        """
        r2 = np.asarray(r2, dtype=float)
        q = np.sqrt(r2) / self.h
        t = np.maximum(2.0 - q, 0.0)
        return -6.0 * self.norm_const * t * t / (self.h * self.h)

    def value(self, x):
        x = np.asarray(x, dtype=float)
        r2 = _squared_radius(x, self.dim)
        return self.value_from_sq(r2)

    def gradient(self, x):
        x = np.asarray(x, dtype=float)
        r2 = _squared_radius(x, self.dim)
        g = self.grad_scale_from_sq(r2)
        return g[..., None] * x

    def peak_value(self):
        return 8.0 * self.norm_const

    def grad_sup_norm(self):
        """sup |grad W|; |dW/dr| = 6 sigma r (2 - r/h)^2 / h^2 peaks at r = 2h/3."""
        return 6.0 * self.norm_const * (32.0 / 27.0) / self.h

    def normalization_residual(self, n_nodes=64):
        """|integral of W - 1| by radial Gauss-Legendre quadrature."""
        nodes, wts = np.polynomial.legendre.leggauss(n_nodes)
        r = 0.5 * self.support_radius * (nodes + 1.0)
        scale = 0.5 * self.support_radius
        integrand = 2.0 * np.pi * r * self.value_from_sq(r * r)
        return abs(float(wts @ integrand) * scale - 1.0)


def _squared_radius(x, dim):
    """Squared norm along the last axis; 1D points may be plain scalars."""
    if x.ndim == 0:
        if dim != 1:
            raise ValueError(f"scalar point passed to a {dim}-dimensional kernel")
        return x * x
    if x.shape[-1] == dim:
        return np.einsum("...d,...d->...", x, x)
    if dim == 1:
        return x * x
    raise ValueError(
        f"point has trailing dimension {x.shape[-1]}, kernel expects {dim}"
    )
