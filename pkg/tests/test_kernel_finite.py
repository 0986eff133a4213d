import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate
from scipy.special import eval_genlaguerre, gammaln

from prodmatrix.errors import ConfigError, DomainError
from prodmatrix.kernel_finite import (
    KernelRequest,
    correlation_function,
    hankel_system,
    kernel_contour,
    kernel_contour_grid,
    kernel_ginibre_finite,
    kernel_ginibre_finite_grid,
    kernel_sum,
    kernel_sum_grid,
    legacy_m2_kernel,
    log_normalization,
    m2_parameter_map,
    p_func,
    phi,
    q_func,
)
from prodmatrix.model import ModelConfig
from prodmatrix.oracle import log_normalization_closed_form
from prodmatrix.specfun import meijer_g

from conftest import rel

# ---------------------------------------------------------------- Hankel system


@pytest.mark.parametrize("n,m,nus,b", [(1, 2, (0,), 0.5), (4, 2, (3,), 2.0), (7, 3, (1, 2), 0.3),
                                       (12, 4, (0, 1, 0), 1.75)])
def test_hankel_inverse_exact(n, m, nus, b):
    h = hankel_system(ModelConfig(n, m, nus, b))
    assert h.residual() < 1e-10


def test_hankel_inverse_against_dense_solve():
    h = hankel_system(ModelConfig(3, 2, (2,), 0.9))
    assert rel(h.c, np.linalg.solve(h.a, np.eye(3))) < 1e-11
    assert h.residual_float() < 1e-10


def test_hankel_conditioning_grows():
    c = [hankel_system(ModelConfig(n, 2, (0,), 1.0)).condition() for n in (2, 4, 6)]
    assert c[0] < c[1] < c[2]


def test_hankel_singular_at_zero_coupling():
    with pytest.raises(DomainError):
        hankel_system(ModelConfig(2, 2, (0,), 0.0))


@pytest.mark.parametrize("n,m,nus,b", [(1, 2, (2,), 0.4), (3, 2, (0,), 0.5), (3, 3, (1, 2), 1.5), (5, 4, (2, 0, 1), 0.75)])
def test_normalisation_three_ways(n, m, nus, b):
    cfg = ModelConfig(n, m, nus, b)
    direct = m * math.lgamma(n + 1) + hankel_system(cfg).log_det_a()
    assert abs(log_normalization(cfg) - direct) < 1e-9 * max(1.0, abs(direct))
    assert abs(log_normalization_closed_form(cfg) - direct) < 1e-9 * max(1.0, abs(direct))


def test_normalisation_keeps_the_gamma_j_factor():
    # without prod Gamma(j) the n = 3 value would be off by log(0! 1! 2!) = log 2
    cfg = ModelConfig(3, 2, (0,), 1.0)
    direct = 2 * math.lgamma(4) + hankel_system(cfg).log_det_a()
    dropped = direct - math.log(2.0)
    assert abs(log_normalization(cfg) - direct) < 1e-12
    assert abs(log_normalization(cfg) - dropped) > 0.5


# ---------------------------------------------------------------- P, Q and phi


@pytest.mark.parametrize("r", [1, 2, 3])
def test_p_sum_equals_loop_integral(r):
    cfg = ModelConfig(4, 3, (1, 2), 0.6)
    for p in range(4):
        a = p_func(r, p, 1.7, cfg)
        c = p_func(r, p, 1.7, cfg, method="contour")
        assert abs(a - c) <= 1e-10 * max(1.0, abs(a))


@pytest.mark.parametrize("s", [1, 2, 3])
def test_q_sum_equals_line_integral(s):
    cfg = ModelConfig(3, 3, (0, 1), 0.8)
    for p in range(3):
        a = q_func(s, p, 0.9, cfg)
        c = q_func(s, p, 0.9, cfg, method="contour")
        assert abs(a - c) <= 1e-9 * abs(a)


def test_pq_biorthogonal():
    # int P_{m,p}(x) Q_{m,q}(x) dx = delta_pq / w_p
    cfg = ModelConfig(3, 2, (1,), 0.7)
    from prodmatrix.kernel_finite import weights

    w = np.exp(weights(cfg))
    for p in range(3):
        for q in range(3):
            val, _ = integrate.quad(lambda s: p_func(2, p, math.exp(s), cfg) * q_func(2, q, math.exp(s), cfg) * math.exp(s),
                                    -25, 10, limit=200, epsabs=1e-11)
            assert abs(val - (1.0 / w[p] if p == q else 0.0)) < 1e-8


# mpmath values of the defining integrals (see tests/oracle notes in the ledger)
FROZEN_PHI = [
    # (r, s, x, y, cfg, value)
    (1, 3, 0.9, 1.6, ModelConfig(1, 3, (1, 2), 0.8), 0.098231622946209100293),
    (1, 4, 0.7, 2.2, ModelConfig(1, 4, (0, 1, 2), 0.6), 0.085439887860873940864),
]


@pytest.mark.parametrize("r,s,x,y,cfg,value", FROZEN_PHI)
def test_phi_frozen(r, s, x, y, cfg, value):
    assert abs(phi(r, s, x, y, cfg) - value) < 1e-11 * value


def test_phi_vanishes_below_diagonal():
    cfg = ModelConfig(2, 3, (1, 0), 0.5)
    assert phi(2, 2, 1.0, 1.3, cfg) == 0.0
    assert phi(3, 1, 1.0, 1.3, cfg) == 0.0


def test_phi_top_reduces_to_meijer_g_as_b_vanishes():
    cfg = ModelConfig(1, 4, (0, 2, 1), 1e-9)
    x, y = 0.8, 1.9
    for r in (1, 2):
        ref = meijer_g(cfg.nu_full[r + 1:5], np.array([y / x]))[0] / x
        assert abs(phi(r, 4, x, y, cfg) - ref) < 1e-7 * ref


def test_phi_intermediate_is_meijer_g():
    cfg = ModelConfig(1, 4, (0, 2, 1), 0.5)
    x, y = 1.1, 3.0
    ref = meijer_g((2, 1), np.array([y / x]))[0] / x
    assert abs(phi(1, 3, x, y, cfg) - ref) < 1e-12 * ref


# ---------------------------------------------------------------- kernel values

FROZEN_K = [
    # n = 1 kernels from direct mpmath quadrature of the defining integrals
    (2, 2, 0.7, 1.3, ModelConfig(1, 2, (1,), 0.5), 0.16763527465170566898),
    (2, 2, 2.0, 0.4, ModelConfig(1, 2, (0,), 1.5), 2.2609571609001598323),
    (3, 3, 0.9, 1.6, ModelConfig(1, 3, (1, 2), 0.8), 0.047446545904767880393),
]


@pytest.mark.parametrize("r,s,x,y,cfg,value", FROZEN_K)
def test_kernel_frozen(r, s, x, y, cfg, value):
    v = kernel_sum(KernelRequest(r, s, x, y), cfg)
    c = kernel_contour(KernelRequest(r, s, x, y), cfg)
    assert abs(v - value) < 1e-11 * value
    assert abs(c.value - value) < 1e-8 * value


def test_laguerre_reduction_level_one():
    # level 1 is the Laguerre ensemble with weight x^nu e^-x, whatever b is
    n, nu = 3, 1
    cfg = ModelConfig(n, 3, (nu, 0), 0.7)
    xs = np.array([0.2, 1.3, 4.0])
    K, _ = kernel_sum_grid(1, 1, xs, xs, cfg)
    k = np.arange(n)
    L = np.array([eval_genlaguerre(kk, nu, xs) for kk in k])
    c = np.exp(gammaln(k + 1) - gammaln(k + nu + 1))
    w = xs ** nu * np.exp(-xs)
    ref = (L.T * c) @ L * np.sqrt(w[:, None] * w[None, :])
    # compare gauge-invariant pieces: diagonal and K(x,y) K(y,x)
    assert rel(np.diag(K), np.diag(ref)) < 1e-12
    assert rel(K * K.T, ref * ref.T) < 1e-11
    assert abs(K[1, 1] - 0.44144995078425148301) < 1e-13


@pytest.mark.parametrize("n,m,nus,b", [(2, 2, (1,), 0.5), (3, 3, (1, 0), 1.2), (2, 4, (0, 1, 2), 0.3)])
def test_sum_and_contour_agree(n, m, nus, b):
    cfg = ModelConfig(n, m, nus, b)
    xs = np.array([0.3, 1.4, 3.1])
    for r in range(1, m + 1):
        for s in range(1, m + 1):
            a, _ = kernel_sum_grid(r, s, xs, xs, cfg)
            c, _, im = kernel_contour_grid(r, s, xs, xs, cfg)
            assert np.max(np.abs(a - c)) <= 1e-8 * np.max(np.abs(c))


@pytest.mark.parametrize("eps", [0.05, 0.45])
def test_contour_value_does_not_depend_on_loop_edge(eps):
    cfg = ModelConfig(4, 3, (1, 0), 0.9)
    xs = np.array([0.5, 2.0])
    for r, s in ((1, 3), (3, 3)):
        a, _, _ = kernel_contour_grid(r, s, xs, xs, cfg)
        c, _, _ = kernel_contour_grid(r, s, xs, xs, cfg, loop_eps=eps)
        assert np.max(np.abs(a - c)) <= 1e-9 * np.max(np.abs(a))


@settings(max_examples=8, deadline=None)
@given(st.floats(0.05, 6.0), st.floats(0.05, 6.0), st.floats(0.05, 2.5), st.integers(1, 3), st.integers(1, 3))
def test_sum_and_contour_agree_random(x, y, b, r, s):
    cfg = ModelConfig(3, 3, (1, 2), b)
    a, _ = kernel_sum_grid(r, s, [x], [y], cfg)
    c, _, _ = kernel_contour_grid(r, s, [x], [y], cfg)
    scale = max(abs(a[0, 0]), abs(kernel_sum_grid(r, r, [x], [x], cfg)[0][0, 0]), 1e-12)
    assert abs(a[0, 0] - c[0, 0]) <= 1e-7 * scale


@pytest.mark.parametrize("level", [1, 2, 3])
def test_trace_is_n(level):
    cfg = ModelConfig(3, 3, (1, 0), 0.9)

    def f(s):
        x = math.exp(s)
        return kernel_sum_grid(level, level, [x], [x], cfg)[0][0, 0] * x

    val, _ = integrate.quad(f, -25, 14, limit=300, epsabs=1e-11)
    assert abs(val - 3.0) < 1e-8


def test_lower_levels_do_not_depend_on_b():
    xs = np.array([0.5, 2.0])
    for r, s in ((1, 1), (1, 2), (2, 1), (2, 2)):
        a, _ = kernel_sum_grid(r, s, xs, xs, ModelConfig(3, 3, (1, 2), 0.2))
        c, _ = kernel_sum_grid(r, s, xs, xs, ModelConfig(3, 3, (1, 2), 3.0))
        assert rel(a, c) < 1e-11


def test_log_gauge_conjugates():
    cfg = ModelConfig(3, 2, (1,), 0.6)
    xs, ys = np.array([0.4, 1.0, 2.5]), np.array([0.7, 3.0])
    g = np.log(xs)[:, None] * 0.7 - ys[None, :] * 0.3
    a, _ = kernel_sum_grid(2, 1, xs, ys, cfg)
    c, _ = kernel_sum_grid(2, 1, xs, ys, cfg, log_gauge=g)
    assert rel(c, a * np.exp(g)) < 1e-12


def test_gauge_leaves_correlations_unchanged():
    # det of the block matrix is unchanged by K -> h(x) K / h(y)
    cfg = ModelConfig(2, 2, (1,), 0.8)
    pts = {1: [0.5, 1.2], 2: [2.0]}
    base = correlation_function(pts, cfg)
    items = [(1, 0.5), (1, 1.2), (2, 2.0)]
    M = np.array([[kernel_sum_grid(r, s, [x], [y], cfg)[0][0, 0] for s, y in items] for r, x in items])
    h = np.array([1.3, 0.2, 5.0])
    assert abs(np.linalg.det(M * h[:, None] / h[None, :]) - base) < 1e-12 * abs(base)


def test_correlation_function_routes_and_edges():
    cfg = ModelConfig(2, 2, (0,), 0.5)
    pts = {1: [0.4], 2: [1.1, 2.3]}
    a = correlation_function(pts, cfg)
    c = correlation_function(pts, cfg, representation="contour")
    assert abs(a - c) < 1e-8 * abs(a)
    assert correlation_function({}, cfg) == 1.0
    one = correlation_function({2: [1.1]}, cfg)
    assert abs(one - kernel_sum_grid(2, 2, [1.1], [1.1], cfg)[0][0, 0]) < 1e-14
    with pytest.raises(ConfigError):
        correlation_function({1: [0.1, 0.2, 0.3]}, cfg)
    with pytest.raises(ConfigError):
        correlation_function(pts, cfg, representation="bogus")


def test_request_validation():
    cfg = ModelConfig(2, 2, (0,), 0.5)
    with pytest.raises(ConfigError):
        kernel_sum(KernelRequest(3, 1, 1.0, 1.0), cfg)
    with pytest.raises(DomainError):
        kernel_sum(KernelRequest(1, 1, 0.0, 1.0), cfg)
    with pytest.raises(DomainError):
        kernel_sum_grid(1, 1, [float("nan")], [1.0], cfg)


def test_small_b_approaches_uncoupled_product():
    cfg = ModelConfig(3, 3, (1, 0), 1e-5)
    xs = np.array([0.5, 1.5, 3.0])
    for r, s in ((3, 3), (2, 3), (3, 1)):
        a, _ = kernel_sum_grid(r, s, xs, xs, cfg)
        g, _, _ = kernel_ginibre_finite_grid(r, s, xs, xs, 3, (1, 0, 0))
        assert rel(a, g) < 1e-3
    ev = kernel_ginibre_finite(KernelRequest(3, 3, 0.5, 1.5), cfg, levels=3)
    assert abs(ev.value - kernel_ginibre_finite_grid(3, 3, [0.5], [1.5], 3, (1, 0, 0))[0][0, 0]) < 1e-13


def test_legacy_two_matrix_kernel():
    n, nu1 = 3, 1
    zeta = np.array([0.3, 1.1, 2.4])
    for mu in (0.25, 0.64):
        b, _ = m2_parameter_map(mu)
        K, _ = kernel_sum_grid(2, 2, zeta / mu, zeta / mu, ModelConfig(n, 2, (nu1,), b))
        assert rel(legacy_m2_kernel(n, nu1, mu, zeta, zeta), K / mu) < 1e-9


def test_parameter_map_domain():
    with pytest.raises(DomainError):
        m2_parameter_map(1.0)
    with pytest.raises(DomainError):
        m2_parameter_map(0.1)
    assert m2_parameter_map(0.18)[0] < 1.0
    b, mu = m2_parameter_map(0.25)
    assert abs(b - 0.75) < 1e-15 and mu == 0.25
