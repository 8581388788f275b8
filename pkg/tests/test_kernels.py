import numpy as np
import pytest

from sphwass import Gaussian1D, WendlandCubic2D

HS = [0.1, 1.0, 10.0]


def make_kernels(h):
    return [Gaussian1D(h), WendlandCubic2D(h)]


def random_points(rng, kernel, count, radius=None):
    if radius is None:
        radius = 3.0 * kernel.h if kernel.dim == 1 else 2.0 * kernel.h
    pts = rng.uniform(-radius, radius, size=(count, kernel.dim))
    return pts


def test_gaussian_peak_value():
    k = Gaussian1D(1.0)
    assert k.value(0.0) == pytest.approx(1.0 / np.sqrt(np.pi), abs=1e-15)
    assert k.value(0.0) == pytest.approx(0.5641895835, abs=1e-9)


def test_gaussian_nonpositive_h_rejected():
    with pytest.raises(ValueError):
        Gaussian1D(0.0)
    with pytest.raises(ValueError):
        Gaussian1D(-1.0)
    with pytest.raises(ValueError):
        WendlandCubic2D(-0.5)


def test_wendland_vanishes_at_support_edge():
    k = WendlandCubic2D(1.0)
    assert k.value(np.array([2.0, 0.0])) == 0.0
    assert k.value(np.array([0.0, 2.0 + 1e-12])) == 0.0
    # continuity approaching the edge from inside
    inside = k.value(np.array([2.0 - 1e-8, 0.0]))
    assert 0.0 < inside < 1e-20


def test_wendland_normalization_constant_from_quadrature():
    # independent oracle: 2D radial quadrature of the unnormalized shape
    # (1 + 3r/2h)(2 - r/h)^3 gives 6.4*pi*h^2, so the unit-integral
    # constant is 1/(6.4 pi h^2) and the peak is 8x that.
    for h in HS:
        r = np.linspace(0.0, 2.0 * h, 400001)
        shape = (1.0 + 1.5 * r / h) * (2.0 - r / h) ** 3
        shape_integral = np.trapezoid(2.0 * np.pi * r * shape, r)
        assert shape_integral == pytest.approx(6.4 * np.pi * h * h, rel=1e-10)
        k = WendlandCubic2D(h)
        assert k.norm_const == pytest.approx(1.0 / shape_integral, rel=1e-10)
    k1 = WendlandCubic2D(1.0)
    assert k1.value(np.zeros(2)) == pytest.approx(8.0 / (6.4 * np.pi), abs=1e-12)
    assert k1.value(np.zeros(2)) == pytest.approx(0.39789, abs=5e-6)


def test_wendland_bare_prefactor_is_not_normalized():
    # with the bare 1/8 prefactor the 2D integral is 0.8*pi*h^2, not 1
    k = WendlandCubic2D(1.0, norm_const=1.0 / 8.0)
    assert k.normalization_residual() == pytest.approx(0.8 * np.pi - 1.0, abs=1e-9)
    assert k.normalization_residual() == pytest.approx(1.513, abs=5e-4)


@pytest.mark.parametrize("h", HS)
def test_normalization_residuals(h):
    assert Gaussian1D(h).normalization_residual() <= 1e-10
    assert WendlandCubic2D(h).normalization_residual() <= 1e-6


@pytest.mark.parametrize("h", [0.5, 1.0, 3.0])
def test_evenness_exact(h, rng):
    for kernel in make_kernels(h):
        pts = random_points(rng, kernel, 10000)
        np.testing.assert_array_equal(kernel.value(pts), kernel.value(-pts))


@pytest.mark.parametrize("h", [0.5, 1.0, 3.0])
def test_gradient_odd_and_zero_at_origin(h, rng):
    for kernel in make_kernels(h):
        origin = np.zeros(kernel.dim)
        np.testing.assert_array_equal(kernel.gradient(origin), origin)
        pts = random_points(rng, kernel, 1000)
        np.testing.assert_array_equal(kernel.gradient(pts), -kernel.gradient(-pts))


@pytest.mark.parametrize("h", [0.5, 1.0, 3.0])
def test_gradient_matches_finite_differences(h, rng):
    for kernel in make_kernels(h):
        # stay inside the support and away from the non-smooth radius 2h edge
        radius = 2.5 * h if kernel.dim == 1 else 1.9 * h
        pts = rng.uniform(-radius / np.sqrt(kernel.dim), radius / np.sqrt(kernel.dim),
                          size=(1000, kernel.dim))
        grad = kernel.gradient(pts)
        step = 1e-6 * h
        for axis in range(kernel.dim):
            shift = np.zeros(kernel.dim)
            shift[axis] = step
            fd = (kernel.value(pts + shift) - kernel.value(pts - shift)) / (2 * step)
            scale = np.maximum(np.abs(grad[:, axis]), kernel.peak_value() / h)
            rel = np.abs(fd - grad[:, axis]) / scale
            assert rel.max() <= 1e-6


def test_gaussian_gradient_value():
    k = Gaussian1D(1.0)
    x = 0.5
    expected = -2.0 * x * k.value(x)
    assert k.gradient(np.array([x]))[0] == pytest.approx(expected, rel=1e-14)
    assert expected == pytest.approx(-0.43939, abs=5e-6)
    # central finite difference oracle
    step = 1e-6
    fd = (k.value(x + step) - k.value(x - step)) / (2 * step)
    assert k.gradient(np.array([x]))[0] == pytest.approx(fd, rel=1e-6)


def test_wendland_gradient_zero_at_and_outside_support(rng):
    k = WendlandCubic2D(1.0)
    edge = np.array([2.0, 0.0])
    np.testing.assert_array_equal(k.gradient(edge), np.zeros(2))
    outside = rng.uniform(2.0, 10.0, size=(500, 2))
    outside *= (np.linalg.norm(outside, axis=1) > 2.0)[:, None] + 0.0
    mask = np.linalg.norm(outside, axis=1) > 2.0
    assert np.all(k.value(outside[mask]) == 0.0)
    assert np.all(k.gradient(outside[mask]) == 0.0)


def test_gradient_sup_norm_matches_numeric_maximization():
    for h in HS:
        g = Gaussian1D(h)
        xs = np.linspace(0, 6 * h, 200001)
        numeric = np.abs(g.gradient(xs[:, None])[:, 0]).max()
        assert g.grad_sup_norm() == pytest.approx(numeric, rel=1e-8)
        w = WendlandCubic2D(h)
        r = np.linspace(0, 2 * h, 200001)
        pts = np.stack([r, np.zeros_like(r)], axis=1)
        numeric_w = np.linalg.norm(w.gradient(pts), axis=1).max()
        assert w.grad_sup_norm() == pytest.approx(numeric_w, rel=1e-8)


def test_gaussian_grad_sup_norm_reference_value():
    # max of |W'| at x = h/sqrt(2); for h = 1 this is 0.48394
    assert Gaussian1D(1.0).grad_sup_norm() == pytest.approx(0.48394, abs=5e-6)


def test_gaussian_optional_cutoff():
    k = Gaussian1D(1.0, cutoff_radius=3.0)
    assert k.value(np.array([3.5])) == 0.0
    assert k.value(np.array([2.5])) > 0.0
    assert k.support_radius == 3.0
    assert Gaussian1D(1.0).support_radius == np.inf


def test_kernel_values_nonnegative(rng):
    for kernel in make_kernels(1.0):
        pts = random_points(rng, kernel, 5000, radius=5.0)
        assert np.all(kernel.value(pts) >= 0.0)


def test_dimension_mismatch_rejected():
    with pytest.raises(ValueError):
        WendlandCubic2D(1.0).value(np.zeros((4, 3)))
