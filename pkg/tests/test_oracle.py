import math

import numpy as np
import pytest
from scipy import integrate
from scipy.special import ive

from prodmatrix.errors import ConfigError, DomainError
from prodmatrix.model import ModelConfig, PointConfiguration
from prodmatrix.oracle import (
    JointDensityQuery,
    andreief_check,
    brute_correlation,
    log_ginibre_density,
    log_joint_density,
    log_normalization_closed_form,
    total_product_density,
)

PTS = np.array([[0.4, 1.3, 2.2], [0.9, 2.7, 5.1], [1.5, 3.8, 9.0]])


def test_joint_density_symmetric_within_levels():
    cfg = ModelConfig(3, 3, (1, 0), 0.6)
    base = log_joint_density(JointDensityQuery(cfg, PointConfiguration(PTS)))
    perm = PTS[:, [2, 0, 1]]
    perm[1] = perm[1, [1, 0, 2]]
    assert abs(log_joint_density(JointDensityQuery(cfg, PointConfiguration(perm))) - base) < 1e-12


def test_joint_density_collision_and_shape():
    cfg = ModelConfig(3, 3, (1, 0), 0.6)
    bad = PTS.copy()
    bad[2, 1] = bad[2, 0]
    with pytest.raises(DomainError):
        log_joint_density(JointDensityQuery(cfg, PointConfiguration(bad)))
    with pytest.raises(ConfigError):
        JointDensityQuery(cfg, PointConfiguration(PTS[:2]))
    with pytest.raises(DomainError):
        JointDensityQuery(cfg, PointConfiguration(-PTS))


def test_small_coupling_gives_ginibre_density():
    cfg = ModelConfig(3, 3, (1, 0), 1e-7)
    a = log_joint_density(JointDensityQuery(cfg, PointConfiguration(PTS)))
    g = log_ginibre_density((1, 0, 0), PTS)
    assert abs(a - g) < 1e-6


def test_normalisation_closed_form_edges():
    assert log_normalization_closed_form(ModelConfig(2, 2, (0,), 0.0)) == -math.inf
    cfg = ModelConfig(2, 2, (1,), 2.0)
    assert abs(log_normalization_closed_form(cfg) - log_normalization_closed_form(cfg, drop_b=True) - math.log(2.0)) < 1e-14


@pytest.mark.parametrize("cfg", [ModelConfig(1, 2, (1,), 0.7), ModelConfig(2, 2, (0,), 1.1)])
def test_top_level_density_routes_agree(cfg):
    ys = [0.8, 2.5][:cfg.n]
    a = total_product_density(cfg, ys, "quadrature")
    c = total_product_density(cfg, ys, "contour")
    assert abs(a - c) < 1e-9 * abs(a)


def test_top_level_density_integrates_to_one():
    cfg = ModelConfig(1, 2, (1,), 0.5)
    val, _ = integrate.quad(lambda s: total_product_density(cfg, [math.exp(s)]) * math.exp(s), -20, 9, limit=200)
    assert abs(val - 1.0) < 1e-8


def test_top_level_density_is_a_marginal():
    cfg = ModelConfig(1, 2, (2,), 0.9)
    v, err = brute_correlation(cfg, {2: [1.7]}, rtol=1e-10)
    assert abs(v - total_product_density(cfg, [1.7])) < 1e-9 * v


@pytest.mark.parametrize("cfg,rtol", [(ModelConfig(1, 2, (1,), 0.4), 1e-9), (ModelConfig(1, 3, (1, 0), 0.4), 1e-6)])
def test_joint_density_normalised(cfg, rtol):
    v, _ = brute_correlation(cfg, {}, rtol=rtol)
    assert abs(v - 1.0) < 10 * rtol


def test_brute_correlation_limits():
    with pytest.raises(ConfigError):
        brute_correlation(ModelConfig(3, 2, (0,), 1.0), {2: [1.0]})
    with pytest.raises(ConfigError):
        brute_correlation(ModelConfig(2, 2, (0,), 1.0), {3: [1.0]})
    with pytest.raises(DomainError):
        brute_correlation(ModelConfig(2, 2, (0,), 1.0), {2: [-1.0]})


def test_andreief_gamma_moments():
    # phi_i = x^i e^-x, psi_j = x^j: moment matrix is Gamma(i + j + 1)
    n = 3
    phis = [lambda x, i=i: x ** i * np.exp(-x) for i in range(n)]
    psis = [lambda x, j=j: x ** j * np.exp(-x / 2) for j in range(n)]
    res = andreief_check(phis, psis)
    exact = math.factorial(n) * np.linalg.det(
        np.array([[math.gamma(i + j + 1) / 1.5 ** (i + j + 1) for j in range(n)] for i in range(n)]))
    assert res.residual < 1e-10
    assert abs(res.rhs - exact) < 1e-10 * abs(exact)


def test_andreief_bessel_pairing():
    # int e^{-y/x} y^{(j-1)/2} I_{j-1}(2 b sqrt y) dy = x^j b^{j-1} e^{b^2 x};
    # the factor e^{2 b sqrt y} is moved from the I side to the other side
    b, xs = 0.6, (0.5, 1.2)
    phis = [lambda y, j=j: y ** ((j - 1) / 2) * ive(j - 1, 2 * b * np.sqrt(y)) for j in (1, 2)]
    psis = [lambda y, x=x: np.exp(-y / x + 2 * b * np.sqrt(y)) for x in xs]
    res = andreief_check(phis, psis)
    M = np.array([[x ** j * b ** (j - 1) * math.exp(b * b * x) for x in xs] for j in (1, 2)])
    assert res.residual < 1e-10
    assert abs(res.rhs - 2 * np.linalg.det(M)) < 1e-10 * abs(res.rhs)


def test_andreief_size_checked():
    with pytest.raises(ConfigError):
        andreief_check([np.exp] * 5, [np.exp] * 5)
