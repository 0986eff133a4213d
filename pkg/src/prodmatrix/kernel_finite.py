"""Finite-n correlation kernel of the coupled product process.

Two independent routes are provided.

* Finite sums: ``K = -phi + sum_p w_p P_{r,p}(x) Q_{s,p}(y)`` with
  ``w_p = Gamma(nu_1+p+1) / (Gamma(nu_1+1)^2 p!)``.
* Double contour: ``K = -phi + S`` where ``S`` is a Cauchy double integral
  over the vertical line ``Re u = -1/2`` and a loop around ``0..n-1``.

Both routes keep magnitudes in log space until the final combination, so
an optional log gauge (a conjugation factor) can be folded in before
anything is exponentiated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np
from scipy.special import gammaln

from .contours import (
    ContourSpec,
    RectangleLoop,
    VerticalLine,
    adapt_half_height,
    cauchy_double_contour,
    integrate_contour,
    log_integral_real_line,
    sigma_n,
    u_line,
)
from .errors import ConfigError, DomainError, LogSpaceOverflow
from .model import ModelConfig
from .specfun import log_bessel_i, log_bessel_k, log_meijer_g, loggamma

__all__ = [
    "KernelRequest",
    "KernelEvaluation",
    "HankelSystem",
    "phi",
    "log_phi_grid",
    "log_phi0",
    "hankel_system",
    "log_normalization",
    "weights",
    "p_func",
    "q_func",
    "kernel_sum",
    "kernel_sum_grid",
    "kernel_contour",
    "kernel_contour_grid",
    "kernel_ginibre_finite",
    "kernel_ginibre_finite_grid",
    "correlation_function",
    "m2_parameter_map",
    "legacy_m2_kernel",
]

# smallest argument accepted by the kernels
MIN_ARG = 1e-12
# default left edge of the t loop; the u line sits at -1/2
T_LEFT = -0.25


@dataclass(frozen=True)
class KernelRequest:
    """Arguments ``(r, x; s, y)`` of ``K_{n,m}(r,x;s,y;b)``."""

    r: int
    s: int
    x: float
    y: float

    def check(self, m: int) -> None:
        if not (1 <= self.r <= m and 1 <= self.s <= m):
            raise ConfigError(f"levels must lie in 1..{m}, got r={self.r}, s={self.s}")
        if not (self.x > MIN_ARG and self.y > MIN_ARG) or not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise DomainError(f"x and y must be finite and > {MIN_ARG}, got {self.x}, {self.y}")


@dataclass
class KernelEvaluation:
    value: float
    error_estimate: float
    imag_residual: float = 0.0


def _check_levels(r, s, m):
    if not (1 <= r <= m and 1 <= s <= m):
        raise ConfigError(f"levels must lie in 1..{m}, got r={r}, s={s}")


def _as_grid(v):
    a = np.atleast_1d(np.asarray(v, dtype=float))
    if a.ndim != 1:
        raise ValueError("grid must be one-dimensional")
    if np.any(~np.isfinite(a)) or np.any(a <= MIN_ARG):
        raise DomainError(f"grid values must be finite and > {MIN_ARG}")
    return a


# ------------------------------------------------------------ transitions

def log_phi_grid(r: int, s: int, xs, ys, cfg: ModelConfig) -> np.ndarray:
    """``log phi_{r,s}(x, y; b)`` on the grid ``xs x ys`` (``-inf`` where zero)."""
    m = cfg.m
    _check_levels(r, s, m)
    xs, ys = _as_grid(xs), _as_grid(ys)
    nu = cfg.nu_full
    out = np.full((xs.size, ys.size), -np.inf)
    if s <= r:
        return out
    lx = np.log(xs)[:, None]
    if s <= m - 1:
        z = ys[None, :] / xs[:, None]
        return log_meijer_g(nu[r + 1:s + 1], z.ravel()).reshape(z.shape) - lx
    b2 = cfg.b ** 2
    if r == m - 1:
        return -ys[None, :] / xs[:, None] - b2 * xs[:, None] - lx
    # r <= m-2, s = m
    params = nu[r + 1:m]
    if len(params) == 1:
        return _log_laplace_k(params[0], xs[:, None], ys[None, :], b2) - lx
    X = np.repeat(xs, ys.size)
    Y = np.tile(ys, xs.size)

    def log_f(sig):
        tau = np.exp(sig)
        lg = log_meijer_g(params[:-1], tau)
        return lg[None, :] + _log_laplace_k(params[-1], X[:, None] * tau[None, :], Y[:, None], b2)

    lv, _ = log_integral_real_line(log_f)
    return lv.reshape(xs.size, ys.size) - lx


def _log_laplace_k(nu, c, y, b2):
    """``log int_0^inf (t/c)^nu e^{-t/c - y/t - b^2 t} dt/t``, in closed form.

    Equal to ``log[2 c^-nu (y/a)^{nu/2} K_nu(2 sqrt(a y))]`` with
    ``a = 1/c + b^2``.  Peeling the last parameter of a Meijer G function off
    as this factor turns the transition integrals into one-dimensional
    integrals over a G function with one parameter fewer.
    """
    c, y = np.broadcast_arrays(np.asarray(c, dtype=float), np.asarray(y, dtype=float))
    a = 1.0 / c + b2
    lk = log_bessel_k(nu, 2.0 * np.sqrt(a * y)).real
    return math.log(2.0) - nu * np.log(c) + 0.5 * nu * np.log(y / a) + lk


def phi(r: int, s: int, x: float, y: float, cfg: ModelConfig) -> float:
    """Transition function ``phi_{r,s}(x, y; b)`` (zero for ``s <= r``)."""
    return float(np.exp(log_phi_grid(r, s, [x], [y], cfg))[0, 0])


def log_phi0(s: int, ys, cfg: ModelConfig) -> np.ndarray:
    """``log phi_{0,s}(i, y)`` for ``i = 1..n``; shape ``(n, len(ys))``."""
    m, n = cfg.m, cfg.n
    if not 1 <= s <= m:
        raise ConfigError(f"level must lie in 1..{m}, got {s}")
    ys = _as_grid(ys)
    nu = cfg.nu_full
    first = nu[1] + np.arange(n)            # nu_1 + i - 1
    if s <= m - 1:
        rows = [log_meijer_g((a,) + tuple(nu[2:s + 1]), ys) for a in first]
        return np.array(rows).reshape(n, ys.size)
    b2 = cfg.b ** 2
    if m == 2:
        return np.array([_log_laplace_k(a, 1.0, ys, b2) for a in first])
    rest = tuple(nu[2:m - 1])
    last = nu[m - 1]

    def log_f(sig):
        tau = np.exp(sig)
        lg = np.array([log_meijer_g((a,) + rest, tau) for a in first])        # (n, len tau)
        lk = _log_laplace_k(last, tau[None, :], ys[:, None], b2)             # (ny, len tau)
        return (lg[:, None, :] + lk[None, :, :]).reshape(n * ys.size, tau.size)

    lv, _ = log_integral_real_line(log_f)
    return lv.reshape(n, ys.size)


# ------------------------------------------------------------ the A matrix

def _gamma_int(k: int) -> int:
    return math.factorial(k - 1)


def _poch_neg(p: int, k: int) -> int:
    # (-p)_k
    out = 1
    for i in range(k):
        out *= (-p + i)
    return out


@dataclass(frozen=True)
class HankelSystem:
    """The matrix ``A`` and its closed-form inverse ``C``, held exactly.

    ``a_exact`` and ``c_exact`` are tuples of :class:`fractions.Fraction`
    rows; ``b`` enters through its exact binary value.  Float views are
    correctly rounded copies.  ``A`` is a Hankel matrix times a diagonal and
    its condition number grows factorially, so the identity ``A C = I`` is
    checked in exact arithmetic; the float residual is reported alongside.
    """

    a_exact: tuple
    c_exact: tuple

    @property
    def n(self) -> int:
        return len(self.a_exact)

    @property
    def a(self) -> np.ndarray:
        return _to_float(self.a_exact)

    @property
    def c(self) -> np.ndarray:
        return _to_float(self.c_exact)

    def residual(self) -> float:
        """``max |A C - I|`` evaluated exactly, then rounded."""
        n = self.n
        worst = Fraction(0)
        for i in range(n):
            for k in range(n):
                acc = sum(self.a_exact[i][j] * self.c_exact[j][k] for j in range(n))
                worst = max(worst, abs(acc - (1 if i == k else 0)))
        return float(worst)

    def residual_float(self) -> float:
        """``max |A C - I|`` with both factors and the product in float64."""
        return float(np.max(np.abs(self.a @ self.c - np.eye(self.n))))

    def condition(self) -> float:
        return float(np.linalg.cond(self.a))

    def log_det_a(self) -> float:
        """``log det A`` from exact Gaussian elimination."""
        rows = [list(r) for r in self.a_exact]
        n = len(rows)
        det = Fraction(1)
        for k in range(n):
            piv = next((i for i in range(k, n) if rows[i][k] != 0), None)
            if piv is None:
                return -math.inf
            if piv != k:
                rows[k], rows[piv] = rows[piv], rows[k]
                det = -det
            det *= rows[k][k]
            for i in range(k + 1, n):
                f = rows[i][k] / rows[k][k]
                if f:
                    for j in range(k, n):
                        rows[i][j] -= f * rows[k][j]
        if det <= 0:
            raise DomainError("det A is not positive")
        return math.log(det.numerator) - math.log(det.denominator)


def _to_float(rows) -> np.ndarray:
    try:
        return np.array([[float(v) for v in row] for row in rows])
    except OverflowError as exc:
        raise LogSpaceOverflow("an entry of A or C exceeds the float range") from exc


def hankel_system(cfg: ModelConfig) -> HankelSystem:
    """Build ``a_ij = b^{j-1} Gamma(i+j-1+nu_1) prod_{l=2}^{m-1} Gamma(j+nu_l)`` and its inverse.

    ``c_jk = [b^{j-1} prod_{l=2}^{m-1} Gamma(j+nu_l)]^{-1}
    sum_p Gamma(nu_1+p+1) (-p)_{j-1} (-p)_{k-1}
    / (Gamma(nu_1+j) Gamma(nu_1+k) p! (j-1)! (k-1)!)``.

    Raises
    ------
    DomainError
        If ``b = 0`` and ``n > 1`` (``A`` is then singular).
    """
    n, m = cfg.n, cfg.m
    nu = cfg.nu_full
    if cfg.b == 0 and n > 1:
        raise DomainError("A is singular at b = 0 for n > 1")
    b = Fraction(cfg.b)
    nu1 = nu[1]

    def col(j):
        out = b ** (j - 1)
        for l in range(2, m):
            out *= _gamma_int(j + nu[l])
        return out

    cols = [col(j) for j in range(1, n + 1)]
    a = tuple(tuple(cols[j - 1] * _gamma_int(i + j - 1 + nu1) for j in range(1, n + 1)) for i in range(1, n + 1))
    fact = [math.factorial(k) for k in range(n + 1)]
    c = []
    for j in range(1, n + 1):
        row = []
        for k in range(1, n + 1):
            acc = Fraction(0)
            for p in range(n):
                num = math.factorial(nu1 + p) * _poch_neg(p, j - 1) * _poch_neg(p, k - 1)
                if num:
                    acc += Fraction(num, _gamma_int(nu1 + j) * _gamma_int(nu1 + k) * fact[p] * fact[j - 1] * fact[k - 1])
            row.append(acc / cols[j - 1])
        c.append(tuple(row))
    return HankelSystem(a, tuple(c))


def log_normalization(cfg: ModelConfig) -> float:
    """``log Z_{n,m}(b)`` with ``Z = (n!)^m det A``.

    ``det A = b^{n(n-1)/2} prod_{j=1}^n Gamma(j) prod_{l=1}^{m-1} Gamma(j+nu_l)``
    (the ``Gamma(j)`` factor comes from the Hankel determinant of
    ``Gamma(i+j-1+nu_1)``).
    """
    n, m = cfg.n, cfg.m
    nu = cfg.nu_full
    if cfg.b == 0 and n > 1:
        raise DomainError("the coupled density is degenerate at b = 0 for n > 1")
    out = m * gammaln(n + 1)
    if n > 1:
        out += 0.5 * n * (n - 1) * math.log(cfg.b)
    for j in range(1, n + 1):
        out += gammaln(j) + sum(gammaln(j + nu[l]) for l in range(1, m))
    return float(out)


# ------------------------------------------------------------ P and Q

def weights(cfg: ModelConfig) -> np.ndarray:
    """``log w_p`` for ``p = 0..n-1``."""
    nu1 = cfg.nu_full[1]
    p = np.arange(cfg.n)
    return gammaln(nu1 + p + 1) - 2 * gammaln(nu1 + 1) - gammaln(p + 1)


def _binomial_signs(n: int) -> np.ndarray:
    # B[p, i] = (-p)_i / i! = (-1)^i C(p, i)
    B = np.zeros((n, n))
    for p in range(n):
        for i in range(p + 1):
            B[p, i] = (-1) ** i * math.comb(p, i)
    return B


def _log_p_terms(r: int, xs: np.ndarray, cfg: ModelConfig) -> np.ndarray:
    # log T_i(x), i = 0..n-1, so that P_{r,p} = Gamma(nu_1+1) sum_i (-p)_i/i! T_i
    n, m = cfg.n, cfg.m
    nu = cfg.nu_full
    i = np.arange(n, dtype=float)
    top = r if r <= m - 1 else m - 1
    den = sum(gammaln(nu[j] + i + 1) for j in range(1, top + 1))
    lx = np.log(xs)[:, None]
    if r <= m - 1:
        return i[None, :] * lx - den[None, :]
    b = cfg.b
    if b == 0.0:
        return i[None, :] * lx - gammaln(i + 1)[None, :] - den[None, :]
    li = log_bessel_i(i[None, :], 2.0 * b * np.sqrt(xs)[:, None]).real
    return 0.5 * i[None, :] * lx - i[None, :] * math.log(b) + li - den[None, :]


def _p_scaled(r, xs, cfg):
    """``(log_scale, Ptilde, Pabs)`` with ``P = exp(log_scale) * Ptilde``."""
    lt = _log_p_terms(r, xs, cfg)
    mx = lt.max(axis=1)
    e = np.exp(lt - mx[:, None])
    B = _binomial_signs(cfg.n)
    return mx + gammaln(cfg.nu_full[1] + 1), e @ B.T, e @ np.abs(B).T


def _q_coefficients(cfg):
    # D[p, j] = (-p)_j / ((nu_1+1)_j j!)
    n, nu1 = cfg.n, cfg.nu_full[1]
    B = _binomial_signs(n)
    j = np.arange(n)
    lpoch = gammaln(nu1 + 1 + j) - gammaln(nu1 + 1)
    return B * np.exp(-lpoch)[None, :]


def _q_scaled(s, ys, cfg):
    lphi = log_phi0(s, ys, cfg).T            # (ny, n): phi_{0,s}(j+1, y)
    mx = lphi.max(axis=1)
    e = np.exp(lphi - mx[:, None])
    D = _q_coefficients(cfg)
    return mx, e @ D.T, e @ np.abs(D).T


def p_func(r: int, p: int, x: float, cfg: ModelConfig, method: str = "sum") -> float:
    """``P_{r,p}(x)`` by its finite sum or by the loop integral around ``0..p``."""
    _check_levels(r, r, cfg.m)
    if not 0 <= p <= cfg.n - 1:
        raise ConfigError(f"p must lie in 0..{cfg.n - 1}")
    xs = _as_grid([x])
    if method == "sum":
        ls, pt, _ = _p_scaled(r, xs, cfg)
        return float(np.exp(ls[0]) * pt[0, p])
    if method != "contour":
        raise ConfigError(f"unknown method {method!r}")
    nu = cfg.nu_full
    m, b = cfg.m, cfg.b
    top = r if r <= m - 1 else m - 1
    lx = math.log(x)
    const = p * math.pi * 1j + gammaln(nu[1] + 1) + gammaln(p + 1)

    def f(t):
        w = loggamma(t - p) + const
        for j in range(top + 1):
            w = w - loggamma(t + nu[j] + 1)
        if r <= m - 1:
            w = w + t * lx
        elif b == 0.0:
            w = w + t * lx - loggamma(t + 1)
        else:
            w = w + 0.5 * t * lx - t * math.log(b) + log_bessel_i(t, 2 * b * math.sqrt(x))
        return np.exp(w) / (2j * math.pi)

    spec = ContourSpec(RectangleLoop(T_LEFT, p + 0.5, 0.5))
    return float(integrate_contour(spec, f).value.real)


def q_func(s: int, p: int, y: float, cfg: ModelConfig, method: str = "sum") -> float:
    """``Q_{s,p}(y)`` by its finite sum or by the vertical-line integral at ``Re u = 1/2``."""
    _check_levels(s, s, cfg.m)
    if not 0 <= p <= cfg.n - 1:
        raise ConfigError(f"p must lie in 0..{cfg.n - 1}")
    ys = _as_grid([y])
    if method == "sum":
        ls, qt, _ = _q_scaled(s, ys, cfg)
        return float(np.exp(ls[0]) * qt[0, p])
    if method != "contour":
        raise ConfigError(f"unknown method {method!r}")
    nu = cfg.nu_full
    m, b = cfg.m, cfg.b
    ly = math.log(y)
    const = p * math.pi * 1j + gammaln(1 + nu[1]) - gammaln(1 + nu[1] + p)

    def log_f(u):
        w = const - loggamma(u - p)
        # for s = m the factor Gamma(u + nu_m) = Gamma(u) cancels 1/Gamma(u) of the K weight
        for j in range(min(s, m - 1) + 1):
            w = w + loggamma(u + nu[j])
        if s <= m - 1 or b == 0.0:
            w = w - u * ly
            if s == m:
                w = w + loggamma(u)
        else:
            w = w + math.log(2.0) + u * math.log(b) - 0.5 * u * ly + log_bessel_k(u, 2 * b * math.sqrt(y))
        return np.atleast_2d(w)

    spec = adapt_half_height(ContourSpec(VerticalLine(0.5, 40.0), 1), log_f)
    res = integrate_contour(spec, lambda u: np.exp(log_f(u)[0]) / (2j * math.pi))
    return float(res.value.real)


# ------------------------------------------------------------ finite sums

def _sum_parts(r, s, xs, ys, cfg):
    lpx, pt, pa = _p_scaled(r, xs, cfg)
    lqy, qt, qa = _q_scaled(s, ys, cfg)
    lw = weights(cfg)
    wmax = lw.max()
    w = np.exp(lw - wmax)
    S = (pt * w[None, :]) @ qt.T
    Sabs = (pa * w[None, :]) @ qa.T
    scale = lpx[:, None] + lqy[None, :] + wmax
    return scale, S, Sabs


def kernel_sum_grid(r: int, s: int, xs, ys, cfg: ModelConfig, log_gauge=None):
    """Finite-sum kernel on ``xs x ys``.

    Parameters
    ----------
    log_gauge : array (len(xs), len(ys)), optional
        Added to the log of every term before exponentiation, i.e. the
        result is ``K * exp(log_gauge)``.  Use it for conjugation factors
        that would overflow on their own.

    Returns
    -------
    values, error_estimates : ndarray (len(xs), len(ys))
    """
    _check_levels(r, s, cfg.m)
    xs, ys = _as_grid(xs), _as_grid(ys)
    g = 0.0 if log_gauge is None else np.asarray(log_gauge, dtype=float)
    scale, S, Sabs = _sum_parts(r, s, xs, ys, cfg)
    lphi = log_phi_grid(r, s, xs, ys, cfg)
    if np.any(scale + g > 700) or np.any(lphi + g > 700):
        raise LogSpaceOverflow("kernel value overflows; supply a log gauge")
    with np.errstate(under="ignore"):
        sum_part = np.exp(scale + g) * S
        phi_part = np.exp(lphi + g)
        err = 8e-16 * cfg.n * (np.exp(scale + g) * Sabs + phi_part) + 1e-12 * phi_part
    return sum_part - phi_part, err


def kernel_sum(req: KernelRequest, cfg: ModelConfig) -> float:
    """``K_{n,m}(r,x;s,y;b)`` from the finite sums."""
    req.check(cfg.m)
    v, _ = kernel_sum_grid(req.r, req.s, [req.x], [req.y], cfg)
    return float(v[0, 0])


# ------------------------------------------------------------ double contour

def _log_g_rows(r, xs, nu, m, b, t, extra=None):
    """``log`` of the ``t`` factor: ``x^t p_r(t,x) / prod_{j<=r} Gamma(t+nu_j+1)``."""
    lx = np.log(xs)[:, None]
    top = r if r <= m - 1 else m - 1
    w = np.zeros(t.shape, dtype=complex)
    for j in range(top + 1):
        w = w - loggamma(t + nu[j] + 1)
    if extra is not None:
        w = w + extra(t)
    if r <= m - 1:
        return w[None, :] + t[None, :] * lx
    # r = m: Gamma(t + nu_m + 1) = Gamma(t + 1) cancels the Gamma(t + 1) inside p_m
    if b == 0.0:
        return (w - loggamma(t + 1))[None, :] + t[None, :] * lx
    li = log_bessel_i(t[None, :], 2.0 * b * np.sqrt(xs)[:, None])
    return w[None, :] + 0.5 * t[None, :] * lx - t[None, :] * math.log(b) + li


def _log_f_rows(s, ys, nu, m, b, u, extra=None):
    """``log`` of the ``u`` factor: ``prod_{j<=s} Gamma(u+nu_j+1) y^{-u-1} q_s(u+1,y)``."""
    ly = np.log(ys)[:, None]
    top = s if s <= m - 1 else m - 1
    w = np.zeros(u.shape, dtype=complex)
    for j in range(top + 1):
        w = w + loggamma(u + nu[j] + 1)
    if extra is not None:
        w = w + extra(u)
    if s <= m - 1:
        return w[None, :] - (u[None, :] + 1) * ly
    # s = m: Gamma(u + nu_m + 1) = Gamma(u + 1) cancels 1/Gamma(u + 1) inside q_m
    if b == 0.0:
        return (w + loggamma(u + 1))[None, :] - (u[None, :] + 1) * ly
    z = 2.0 * b * np.sqrt(ys)[:, None]
    lk = log_bessel_k(u[None, :] + 1, z)
    return (w[None, :] - (u[None, :] + 1) * ly + math.log(2.0)
            + (u[None, :] + 1) * np.log(0.5 * z) + lk)


def _contour_s(log_fu, log_gt, spec_t, tilt=0.0, rtol=1e-10):
    spec_u = adapt_half_height(u_line(40.0, tilt), log_fu)
    S, err, _ = cauchy_double_contour(spec_u, spec_t, log_fu, log_gt, rtol=rtol)
    return S, err


def kernel_contour_grid(r: int, s: int, xs, ys, cfg: ModelConfig, rtol: float = 1e-10,
                        gauge_x=None, gauge_y=None, loop_eps: float = T_LEFT + 0.5):
    """Double-contour kernel on ``xs x ys``.

    The ``t`` loop has its left edge at ``-1/2 + loop_eps``; the value does
    not depend on ``loop_eps`` in ``(0, 1/2)``.

    ``gauge_x`` and ``gauge_y`` (logs, one per grid point) multiply the
    result by ``exp(gauge_x[i] + gauge_y[j])``; they are folded into the
    integrands so large conjugation factors never overflow.

    Returns
    -------
    values, error_estimates, imag_residuals : ndarray (len(xs), len(ys))
    """
    _check_levels(r, s, cfg.m)
    xs, ys = _as_grid(xs), _as_grid(ys)
    n, m, b = cfg.n, cfg.m, cfg.b
    nu = cfg.nu_full

    gx, gy = _gauges(xs, ys, gauge_x, gauge_y)

    def log_gt(t):
        return _log_g_rows(r, xs, nu, m, b, t, extra=lambda z: loggamma(z - n + 1)) + gx[:, None]

    def log_fu(u):
        return _log_f_rows(s, ys, nu, m, b, u, extra=lambda z: -loggamma(z - n + 1)) + gy[:, None]

    spec_t = sigma_n(n - 1, eps=loop_eps)
    S, err = _contour_s(log_fu, log_gt, spec_t, rtol=rtol)
    phi_part = np.exp(log_phi_grid(r, s, xs, ys, cfg) + gx[:, None] + gy[None, :])
    return S.real - phi_part, err + np.abs(S.imag), np.abs(S.imag)


def _gauges(xs, ys, gauge_x, gauge_y):
    gx = np.zeros(xs.size) if gauge_x is None else np.broadcast_to(np.asarray(gauge_x, float), xs.shape)
    gy = np.zeros(ys.size) if gauge_y is None else np.broadcast_to(np.asarray(gauge_y, float), ys.shape)
    return np.asarray(gx), np.asarray(gy)


def kernel_contour(req: KernelRequest, cfg: ModelConfig) -> KernelEvaluation:
    """``K_{n,m}(r,x;s,y;b)`` from the double contour integral."""
    req.check(cfg.m)
    v, e, im = kernel_contour_grid(req.r, req.s, [req.x], [req.y], cfg)
    return KernelEvaluation(float(v[0, 0]), float(e[0, 0]), float(im[0, 0]))


# ------------------------------------------------------------ uncoupled product

def _ginibre_nu(nus):
    nus = tuple(int(v) for v in nus)
    if not nus or any(v < 0 for v in nus):
        raise ConfigError("need at least one level and every nu >= 0")
    return (0,) + nus


def kernel_ginibre_finite_grid(r: int, s: int, xs, ys, n: int, nus: Sequence[int], rtol: float = 1e-10):
    """Kernel of the uncoupled product of ``len(nus)`` Ginibre matrices.

    ``nus = (nu_1, ..., nu_L)`` gives the column excess of each factor;
    level ``l`` is the product of the first ``l`` factors.

    Returns
    -------
    values, error_estimates, imag_residuals : ndarray
    """
    nu = _ginibre_nu(nus)
    L = len(nu) - 1
    _check_levels(r, s, L)
    xs, ys = _as_grid(xs), _as_grid(ys)
    # L + 1 keeps both levels below the coupled top level, so p = q = 1
    def log_gt(t):
        return _log_g_rows(r, xs, nu, L + 1, 0.0, t, extra=lambda z: loggamma(z - n + 1))

    def log_fu(u):
        return _log_f_rows(s, ys, nu, L + 1, 0.0, u, extra=lambda z: -loggamma(z - n + 1))

    S, err = _contour_s(log_fu, log_gt, sigma_n(n - 1, eps=T_LEFT + 0.5), rtol=rtol)
    phi_part = np.zeros(S.shape)
    if s > r:
        z = ys[None, :] / xs[:, None]
        phi_part = np.exp(log_meijer_g(nu[r + 1:s + 1], z.ravel()).reshape(z.shape)) / xs[:, None]
    return S.real - phi_part, err + np.abs(S.imag), np.abs(S.imag)


def kernel_ginibre_finite(req: KernelRequest, cfg: ModelConfig, levels: int | None = None) -> KernelEvaluation:
    """Uncoupled Ginibre product kernel matching ``cfg``.

    ``levels = m - 1`` (default) gives the first ``m - 1`` levels of the
    coupled model, which do not feel ``b``; ``levels = m`` appends an
    independent square factor, the ``b -> 0`` limit of the coupled model.
    """
    levels = cfg.m - 1 if levels is None else int(levels)
    if levels == cfg.m - 1:
        nus = cfg.nus
    elif levels == cfg.m:
        nus = cfg.nus + (0,)
    else:
        raise ConfigError("levels must be m - 1 or m")
    req.check(levels)
    v, e, im = kernel_ginibre_finite_grid(req.r, req.s, [req.x], [req.y], cfg.n, nus)
    return KernelEvaluation(float(v[0, 0]), float(e[0, 0]), float(im[0, 0]))


# ------------------------------------------------------------ correlations

def correlation_function(points: Mapping[int, Sequence[float]], cfg: ModelConfig,
                         representation: str = "sum") -> float:
    """Correlation function as the determinant of the block kernel matrix.

    Parameters
    ----------
    points : mapping level -> points on that level (at most ``n`` each)
    representation : {"sum", "contour"}
    """
    items = []
    for level, xs in sorted(points.items()):
        _check_levels(level, level, cfg.m)
        xs = list(xs)
        if len(xs) > cfg.n:
            raise ConfigError(f"at most n = {cfg.n} points per level")
        items += [(level, float(x)) for x in xs]
    if not items:
        return 1.0
    k = len(items)
    M = np.empty((k, k))
    levels = sorted({l for l, _ in items})
    for r in levels:
        ri = [i for i, (l, _) in enumerate(items) if l == r]
        for s in levels:
            si = [j for j, (l, _) in enumerate(items) if l == s]
            xs = [items[i][1] for i in ri]
            ys = [items[j][1] for j in si]
            if representation == "sum":
                block, _ = kernel_sum_grid(r, s, xs, ys, cfg)
            elif representation == "contour":
                block = kernel_contour_grid(r, s, xs, ys, cfg)[0]
            else:
                raise ConfigError(f"unknown representation {representation!r}")
            M[np.ix_(ri, si)] = block
    return float(np.linalg.det(M))


# ------------------------------------------------------------ two-matrix map

def m2_parameter_map(mu: float) -> tuple[float, float]:
    """Coupling and scale of the two-matrix model in the ``mu`` parametrisation.

    Returns ``(b, mu)`` with ``b = (1 - mu) / (2 sqrt(mu))``; points of the
    ``mu`` model are ``mu`` times the points of the coupled model.
    """
    mu = float(mu)
    if not 0.0 < mu < 1.0:
        raise DomainError(f"mu must lie in (0, 1), got {mu}")
    b = (1.0 - mu) / (2.0 * math.sqrt(mu))
    # the two-matrix model is only defined for b < 1, i.e. mu > (sqrt 2 - 1)^2
    if not b < 1.0:
        raise DomainError(f"mu = {mu} gives b = {b:.4g} >= 1, outside the two-matrix model")
    return b, mu


def legacy_m2_kernel(n: int, nu1: int, mu: float, zeta, eta) -> np.ndarray:
    """Kernel ``sum_k P_k(zeta) Q_k(eta)`` of the two-matrix model in the ``mu`` form.

    An independent evaluation of the classical formulas (scipy Bessel
    routines, plain float sums) used to cross-check the coupled kernel at
    ``m = 2``.  It is a density kernel in the ``zeta`` variables, so it equals
    ``K_{n,2}(2, zeta/mu; 2, eta/mu; b) / mu``.
    """
    from scipy.special import iv, kv

    m2_parameter_map(mu)
    z = np.atleast_1d(np.asarray(zeta, dtype=float))
    e = np.atleast_1d(np.asarray(eta, dtype=float))
    out = np.zeros((z.size, e.size))
    sz, se = np.sqrt(z), np.sqrt(e)
    for k in range(n):
        P = np.zeros(z.size)
        Q = np.zeros(e.size)
        for j in range(k + 1):
            c = _poch_neg(k, j) / (math.factorial(nu1 + j) * math.factorial(j))
            P += c * (2 * sz / (1 - mu)) ** j * iv(j, (1 - mu) / mu * sz)
            Q += c * (2 * se / (1 + mu)) ** (j + nu1) * kv(j + nu1, (1 + mu) / mu * se)
        P *= (-1) ** k * math.factorial(nu1 + k) * math.factorial(k) / math.sqrt(mu)
        Q *= 2 * (-1) ** k / (math.sqrt(mu) * math.factorial(k) ** 2)
        out += P[:, None] * Q[None, :]
    return out
