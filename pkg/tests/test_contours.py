import math

import mpmath as mp
import numpy as np
import pytest

from prodmatrix.contours import (
    ContourSpec,
    RectangleLoop,
    VerticalLine,
    adapt_half_height,
    adapt_right_cut,
    cauchy_double_contour,
    contour_distance,
    double_contour,
    integrate_contour,
    log_integral_real_line,
    sigma_inf,
    sigma_n,
    u_line,
)
from prodmatrix.errors import QuadratureFailure, SeparationError
from prodmatrix.specfun import loggamma


def test_residue_on_rectangle():
    spec = sigma_n(4)
    for a in (0.0, 1.3 + 0.2j, 3.9):
        res = integrate_contour(spec, lambda z: 1.0 / (z - a))
        assert abs(res.value - 2j * math.pi) < 1e-12


def test_point_outside_rectangle_gives_zero():
    res = integrate_contour(sigma_n(2), lambda z: 1.0 / (z - 5.0))
    assert abs(res.value) < 1e-12


def test_mellin_barnes_exponential():
    # (2 pi i)^-1 int_{c - i inf}^{c + i inf} Gamma(u) y^-u du = e^-y
    spec = ContourSpec(VerticalLine(0.7, 60.0), panels_per_unit=2)
    y = 1.7
    res = integrate_contour(spec, lambda u: np.exp(loggamma(u) - u * math.log(y)), rtol=1e-12, tol=0)
    assert abs(res.value / (2j * math.pi) - math.exp(-y)) < 1e-12


def test_tilted_line_same_value():
    # e^{u^2} decays on both the straight and the bent path
    f = lambda u: np.exp(u * u) / (u - 1.0)
    a = integrate_contour(ContourSpec(VerticalLine(-0.5, 12.0)), f).value
    b = integrate_contour(ContourSpec(VerticalLine(-0.5, 12.0, tilt=0.3)), f).value
    assert abs(a - b) < 1e-11


def test_cauchy_double_contour_matches_mpmath():
    # inner loop picks the pole of 1/(t - a); the outer line integral is done by mpmath
    a = np.array([0.5, 2.0])
    spec_t = sigma_n(3)
    spec_u = u_line(8.0)

    def log_gt(t):
        return -np.log(t[None, :] - a[:, None] + 0j)

    def log_fu(u):
        return (u * u)[None, :]

    S, err, _ = cauchy_double_contour(spec_u, spec_t, log_fu, log_gt, rtol=1e-12)
    for i, ai in enumerate(a):
        ref = mp.quad(lambda v: mp.e ** ((-0.5 + 1j * v) ** 2) / ((-0.5 + 1j * v) - ai), [-mp.inf, 0, mp.inf]) * 1j
        ref = complex(ref / (2j * mp.pi))
        assert abs(S[i, 0] - ref) < 1e-11


def test_double_contour_agrees_with_cauchy_form():
    spec_t, spec_u = sigma_n(2), u_line(8.0)
    a = 1.0
    f = lambda U, T: np.exp(U * U) / (T - a) / (U - T)
    d = double_contour(spec_u, spec_t, f).value / (2j * np.pi) ** 2
    S, _, _ = cauchy_double_contour(spec_u, spec_t, lambda u: (u * u)[None, :],
                                    lambda t: -np.log(t[None, :] - a + 0j))
    assert abs(d - S[0, 0]) < 1e-10


def test_separation_enforced():
    close = ContourSpec(RectangleLoop(-0.49, 2.0))
    assert contour_distance(u_line(), close) < 0.05
    with pytest.raises(SeparationError):
        cauchy_double_contour(u_line(), close, lambda u: u[None, :] * 0, lambda t: t[None, :] * 0)


def test_degenerate_loop_rejected():
    with pytest.raises(ValueError):
        ContourSpec(RectangleLoop(1.0, 0.5)).segments()
    with pytest.raises(ValueError):
        ContourSpec(RectangleLoop(0.0, 1.0), panels_per_unit=0)


def test_log_integral_gamma_function():
    # int_0^inf t^{a-1} e^-t dt with t = e^s
    a = np.array([0.5, 3.0, 40.0])
    lv, err = log_integral_real_line(lambda s: a[:, None] * s[None, :] - np.exp(s)[None, :])
    from scipy.special import gammaln
    assert np.max(np.abs(lv - gammaln(a))) < 1e-12


def test_log_integral_rejects_non_decaying():
    with pytest.raises(QuadratureFailure):
        log_integral_real_line(lambda s: np.zeros((1, s.size)))


def test_adapt_half_height_cuts_gaussian():
    spec = adapt_half_height(u_line(), lambda u: (u * u)[None, :])
    # e^{-v^2} drops 37 e-folds by |v| ~ 6.1
    assert 6.0 < spec.kind.half_height < 9.0


def test_adapt_right_cut_finds_decay():
    spec = adapt_right_cut(sigma_inf(8), lambda t: (-t)[None, :])
    assert 30 < spec.kind.right_cut < 45
