"""Hard-edge limit kernels and numerical checks of the scaling limits.

The limit kernels share the double-contour code of the finite kernel: the
ratio ``Gamma(t-n+1)/Gamma(u-n+1)`` becomes ``sin(pi u)/sin(pi t)`` and the
loop around ``0..n-1`` becomes a loop around all non-negative integers,
truncated where the ``t`` integrand has died off.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import jv, jvp

from .contours import adapt_right_cut, cauchy_double_contour, adapt_half_height, sigma_inf, u_line
from .errors import ConfigError, DomainError
from .kernel_finite import (
    MIN_ARG,
    T_LEFT,
    _as_grid,
    _check_levels,
    _log_f_rows,
    _log_g_rows,
    kernel_contour_grid,
    kernel_sum_grid,
    log_phi_grid,
)
from .model import ModelConfig
from .specfun import log_meijer_g, log_sin_pi

__all__ = [
    "LimitRegime",
    "Weak",
    "Interpolating",
    "Strong",
    "kernel_ginibre_infinite",
    "kernel_ginibre_infinite_grid",
    "kernel_interpolating",
    "kernel_interpolating_grid",
    "bessel_kernel_closed_form",
    "ScalingReport",
    "verify_scaling_limit",
    "coupling_sequence",
    "delta_mass_check",
]

# tail angle of the u line when nothing damps sin(pi u) there
U_TILT = math.pi / 4


# ------------------------------------------------------------ regimes

@dataclass(frozen=True)
class LimitRegime:
    """How the coupling ``b`` grows with ``n``."""

    kind: str
    alpha: float | None = None

    def __post_init__(self):
        if self.kind not in ("weak", "interpolating", "strong"):
            raise ConfigError(f"unknown regime {self.kind!r}")
        if self.kind == "interpolating":
            if self.alpha is None or not (math.isfinite(self.alpha) and self.alpha > 0):
                raise ConfigError("the interpolating regime needs a finite alpha > 0")

    def coupling(self, n: int) -> float:
        """``b(n)``: ``n^(1/4)``, ``alpha sqrt(n)`` or ``n``."""
        if self.kind == "weak":
            return n ** 0.25
        if self.kind == "interpolating":
            return self.alpha * math.sqrt(n)
        return float(n)


def Weak() -> LimitRegime:
    return LimitRegime("weak")


def Interpolating(alpha: float) -> LimitRegime:
    return LimitRegime("interpolating", float(alpha))


def Strong() -> LimitRegime:
    return LimitRegime("strong")


# ------------------------------------------------------------ limit kernels

def _limit_contour(r, s, xs, ys, nu, m, b, rtol):
    def log_gt(t):
        return _log_g_rows(r, xs, nu, m, b, t, extra=lambda z: -log_sin_pi(z))

    def log_fu(u):
        return _log_f_rows(s, ys, nu, m, b, u, extra=log_sin_pi)

    # sin(pi u) grows like the decay of prod Gamma(u + nu_j + 1) when only two
    # Gamma factors are present; bending the tails left restores decay there
    tilt = U_TILT if (s == 1 and s <= m - 1) else 0.0
    spec_t = adapt_right_cut(sigma_inf(8.5, eps=T_LEFT + 0.5), log_gt)
    spec_u = adapt_half_height(u_line(40.0, tilt), log_fu)
    S, err, _ = cauchy_double_contour(spec_u, spec_t, log_fu, log_gt, rtol=rtol)
    return S


def kernel_ginibre_infinite_grid(r: int, s: int, xs, ys, nus: Sequence[int], rtol: float = 1e-11):
    """Limiting kernel of the uncoupled product of ``len(nus)`` Ginibre matrices.

    Returns
    -------
    values, imag_residuals : ndarray (len(xs), len(ys))
    """
    nus = tuple(int(v) for v in nus)
    if not nus or any(v < 0 for v in nus):
        raise ConfigError("need at least one level and every nu >= 0")
    nu = (0,) + nus
    L = len(nus)
    _check_levels(r, s, L)
    xs, ys = _as_grid(xs), _as_grid(ys)
    S = _limit_contour(r, s, xs, ys, nu, L + 1, 0.0, rtol)
    g = np.zeros(S.shape)
    if s > r:
        z = ys[None, :] / xs[:, None]
        g = np.exp(log_meijer_g(nu[r + 1:s + 1], z.ravel()).reshape(z.shape)) / xs[:, None]
    return S.real - g, np.abs(S.imag)


def kernel_ginibre_infinite(r: int, s: int, x: float, y: float, nus: Sequence[int]) -> float:
    """``K^Gin_{inf}(r,x;s,y)`` for the product of ``len(nus)`` Ginibre matrices."""
    v, _ = kernel_ginibre_infinite_grid(r, s, [x], [y], nus)
    return float(v[0, 0])


def kernel_interpolating_grid(r: int, s: int, xs, ys, alpha: float, nus: Sequence[int],
                              rtol: float = 1e-11):
    """Interpolating limit kernel on ``xs x ys`` for the coupled model.

    ``nus = (nu_1, ..., nu_{m-1})``.  Blocks with ``r, s <= m - 1`` do not
    feel the coupling and are the uncoupled limit kernel of ``m - 1`` levels.

    Returns
    -------
    values, imag_residuals : ndarray
    """
    if not (math.isfinite(alpha) and alpha > 0):
        raise DomainError(f"alpha must be finite and > 0, got {alpha}")
    cfg = ModelConfig(1, len(nus) + 1, tuple(nus), alpha)
    m = cfg.m
    _check_levels(r, s, m)
    if r <= m - 1 and s <= m - 1:
        return kernel_ginibre_infinite_grid(r, s, xs, ys, cfg.nus, rtol)
    xs, ys = _as_grid(xs), _as_grid(ys)
    S = _limit_contour(r, s, xs, ys, cfg.nu_full, m, alpha, rtol)
    # the transition functions do not depend on n
    return S.real - np.exp(log_phi_grid(r, s, xs, ys, cfg)), np.abs(S.imag)


def kernel_interpolating(r: int, s: int, x: float, y: float, alpha: float, nus: Sequence[int]) -> float:
    """``K^int_{inf}(r,x;s,y;alpha)``."""
    v, _ = kernel_interpolating_grid(r, s, [x], [y], alpha, nus)
    return float(v[0, 0])


def bessel_kernel_closed_form(nu: float, x, y):
    """Classical hard-edge Bessel kernel ``K_nu(x, y)``.

    ``[J(sx) sy J'(sy) - sx J'(sx) J(sy)] / (2 (x - y))`` with ``sx = sqrt(x)``
    and ``J = J_nu``; on the diagonal the confluent form
    ``[J_nu(sx)^2 - J_{nu+1}(sx) J_{nu-1}(sx)] / 4``.
    """
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    if np.any(x <= 0) or np.any(y <= 0):
        raise DomainError("the Bessel kernel needs x, y > 0")
    sx, sy = np.sqrt(x), np.sqrt(y)
    diag = np.isclose(x, y, rtol=1e-10, atol=0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        off = (jv(nu, sx) * sy * jvp(nu, sy) - sx * jvp(nu, sx) * jv(nu, sy)) / (2.0 * (x - y))
    on = 0.25 * (jv(nu, sx) ** 2 - jv(nu + 1, sx) * jv(nu - 1, sx))
    out = np.where(diag, on, off)
    return out[()] if out.ndim == 0 else out


# ------------------------------------------------------------ scaling limits

@dataclass
class ScalingReport:
    """Sup-norm distance between rescaled finite kernels and their limit."""

    regime: LimitRegime
    r: int
    s: int
    ns: list
    distances: list
    limit: np.ndarray = field(repr=False)

    @property
    def monotone(self) -> bool:
        d = self.distances
        return all(b < a for a, b in zip(d, d[1:]))

    def passed(self, threshold: float = 5e-2) -> bool:
        return self.monotone and self.distances[-1] < threshold


def coupling_sequence(regime: LimitRegime, ns: Sequence[int], m: int, nus: Sequence[int]) -> list:
    """Model configurations ``(n, b(n))`` along ``ns`` for ``regime``."""
    return [ModelConfig(int(n), m, tuple(nus), regime.coupling(int(n))) for n in ns]


def _rescaled_finite(regime, r, s, xs, ys, cfg):
    """Finite kernel with the scaling and conjugation factors of ``regime``."""
    n, m, b = cfg.n, cfg.m, cfg.b
    if regime.kind != "strong" or (r <= m - 1 and s <= m - 1):
        return _finite_block(r, s, xs / n, ys / n, cfg, np.full(xs.size, -math.log(n)), np.zeros(ys.size))
    lam = b * b / n
    lx, ly = np.log(xs), np.log(ys)
    # level m is read in the variable b^2 x^2 / n^2, the others in x / n
    X = b * b * xs ** 2 / n ** 2 if r == m else xs / n
    Y = b * b * ys ** 2 / n ** 2 if s == m else ys / n
    gx = np.zeros(xs.size)
    gy = np.zeros(ys.size)
    const = 0.0
    if r == m:
        gx += 0.5 * lx - 2.0 * lam * xs
        const += math.log(b) - 1.5 * math.log(n) + 0.5 * math.log(2.0)
    if s == m:
        gy += 0.5 * ly + 2.0 * lam * ys
        const += math.log(b) - 1.5 * math.log(n) + 0.5 * math.log(2.0)
    if r == m and s != m:
        const += 0.5 * math.log(2.0 * math.pi)
    if s == m and r != m:
        const -= 0.5 * math.log(2.0 * math.pi)
    if r == m and s == m:
        # 2 b^2 sqrt(xy) / n^2 in total
        const = math.log(2.0) + 2.0 * math.log(b) - 2.0 * math.log(n)
    return _finite_block(r, s, X, Y, cfg, gx + const, gy)


def _finite_block(r, s, X, Y, cfg, gx, gy):
    """``K(r,X;s,Y) exp(gx_i + gy_j)``, by the sum unless it has cancelled.

    For large ``n b`` the finite sum loses every digit (its own error
    estimate says so); the contour route does not cancel.
    """
    v, err = kernel_sum_grid(r, s, X, Y, cfg, log_gauge=gx[:, None] + gy[None, :])
    if np.max(err) <= 1e-8 * np.max(np.abs(v)):
        return v
    v, _, _ = kernel_contour_grid(r, s, X, Y, cfg, gauge_x=gx, gauge_y=gy)
    return v


def _limit_values(regime, r, s, xs, ys, m, nus):
    if regime.kind == "weak":
        # all m levels, the last factor square
        return kernel_ginibre_infinite_grid(r, s, xs, ys, nus + (0,))[0]
    if regime.kind == "interpolating":
        return kernel_interpolating_grid(r, s, xs, ys, regime.alpha, nus)[0]
    # strong: level m collapses onto level m - 1
    rr = min(r, m - 1)
    ss = min(s, m - 1)
    return kernel_ginibre_infinite_grid(rr, ss, xs, ys, nus)[0]


def verify_scaling_limit(regime: LimitRegime, r: int, s: int, xs, ys,
                         ns: Sequence[int] = (20, 40, 80), m: int = 2,
                         nus: Sequence[int] = (1,)) -> ScalingReport:
    """Distances ``sup |rescaled K_n - K_limit|`` over the grid ``xs x ys``.

    The finite kernel is rescaled for the regime, including the
    conjugation factors of the strong regime.  Keep
    ``|x - y|`` away from zero for the strong-regime block ``(m-1, m)``,
    whose limit carries a contact term ``delta(x - y)``.
    """
    xs, ys = _as_grid(xs), _as_grid(ys)
    nus = tuple(int(v) for v in nus)
    if len(nus) != m - 1:
        raise ConfigError(f"need m-1 = {m - 1} values of nu")
    _check_levels(r, s, m)
    ns = [int(n) for n in ns]
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise ConfigError("n sequence must increase")
    lim = _limit_values(regime, r, s, xs, ys, m, nus)
    dists = []
    for cfg in coupling_sequence(regime, ns, m, nus):
        v = _rescaled_finite(regime, r, s, xs, ys, cfg)
        dists.append(float(np.max(np.abs(v - lim))))
    return ScalingReport(regime, r, s, ns, dists, lim)


def delta_mass_check(cfg_sequence: Sequence[ModelConfig], x0: float, r: int | None = None) -> list:
    """Mass of the rescaled ``phi_{m-1,m}`` term near ``x0`` along a sequence.

    In the strong regime the transition term of the block ``(m-1, m)``,
    after rescaling, tends to ``delta(x - x0)``.  For each
    configuration this returns ``int (rescaled phi)(x0, y) dy`` over the
    window ``|y - x0| < x0``, where the integrand is
    ``sqrt(2) b sqrt(y) / n^(3/2) * phi(x0/n, b^2 y^2/n^2) * e^{2 b^2 y/n} / sqrt(2 pi)``.
    """
    if not x0 > 0:
        raise DomainError("x0 must be positive")
    out = []
    xg, wg = np.polynomial.legendre.leggauss(64)
    for cfg in cfg_sequence:
        n, m, b = cfg.n, cfg.m, cfg.b
        lam = b * b / n
        # the Gaussian has width sqrt(x0 / (2 lam)); integrate on +-12 widths
        half = min(x0, 12.0 * math.sqrt(x0 / (2.0 * lam)))
        edges = np.linspace(x0 - half, x0 + half, 33)
        a, c = edges[:-1], edges[1:]
        ys = (0.5 * (a + c)[:, None] + 0.5 * (c - a)[:, None] * xg[None, :]).ravel()
        ws = (0.5 * (c - a)[:, None] * wg[None, :]).ravel()
        lphi = log_phi_grid(m - 1, m, [x0 / n], b * b * ys ** 2 / n ** 2, cfg)[0]
        lpre = (0.5 * math.log(2.0) + math.log(b) + 0.5 * np.log(ys) - 1.5 * math.log(n)
                + 2.0 * lam * ys - 0.5 * math.log(2.0 * math.pi))
        out.append(float(np.sum(ws * np.exp(lphi + lpre))))
    return out
