"""Brute-force ground truth at tiny sizes.

Nothing here uses the kernel code.  Joint densities are assembled from
explicit cofactor expansions of row-scaled determinants, and correlation
functions are obtained by integrating the joint density directly with a
tensor-product trapezoidal rule in the variable ``y = exp(sinh(tau))``.
That map decays double exponentially at both ends of ``(0, inf)``, so the
rule converges geometrically for these smooth integrands.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy import integrate
from scipy.special import gammaln, ive

from .errors import ConfigError, DomainError, QuadratureFailure, SignError
from .model import ModelConfig, PointConfiguration
from .specfun import log_bessel_k, log_meijer_g, loggamma

__all__ = [
    "JointDensityQuery",
    "log_joint_density",
    "log_ginibre_density",
    "log_normalization_closed_form",
    "total_product_density",
    "brute_correlation",
    "AndreiefResult",
    "andreief_check",
    "MAX_N",
    "MAX_DIM",
]

MAX_N = 4
MAX_DIM = 4
# points on one level closer than this are a collision
COLLISION = 1e-12


@dataclass(frozen=True)
class JointDensityQuery:
    """A full point set: ``points.level(l)`` holds the ``n`` points of level ``l``."""

    cfg: ModelConfig
    points: PointConfiguration

    def __post_init__(self):
        p = self.points
        if p.m != self.cfg.m or p.n != self.cfg.n:
            raise ConfigError(f"need an {self.cfg.m} x {self.cfg.n} point set, got {p.m} x {p.n}")
        if not np.all(np.isfinite(p.points)) or np.any(p.points <= 0):
            raise DomainError("all points must be finite and positive")


# ------------------------------------------------------------ determinants

def _det(M):
    # cofactor expansion along the first row, batched over leading axes
    n = M.shape[-1]
    if n == 1:
        return M[..., 0, 0]
    if n == 2:
        return M[..., 0, 0] * M[..., 1, 1] - M[..., 0, 1] * M[..., 1, 0]
    out = np.zeros(M.shape[:-2])
    rows = np.arange(1, n)
    for k in range(n):
        cols = np.r_[0:k, k + 1:n]
        minor = M[..., rows[:, None], cols[None, :]]
        out = out + (-1) ** k * M[..., 0, k] * _det(minor)
    return out


def _log_det(E):
    """``(sign, log|det exp(E)|)`` for log-entry matrices ``E[..., j, k]``."""
    shift = np.max(E, axis=-1)
    shift = np.where(np.isfinite(shift), shift, 0.0)
    d = _det(np.exp(E - shift[..., None]))
    with np.errstate(divide="ignore"):
        return np.sign(d), np.log(np.abs(d)) + shift.sum(axis=-1)


def _log_iv(k, z):
    # log I_k(z) for integer k >= 0 and z >= 0
    z = np.asarray(z, dtype=float)
    with np.errstate(divide="ignore"):
        big = np.log(ive(k, z)) + z
    small = k * np.log(np.maximum(z, 1e-300) / 2) - gammaln(k + 1) + np.log1p(z * z / (4 * (k + 1)))
    return np.where(z < 1e-3, small, big)


def _level_m_entries(cfg, ym):
    """Log entries of ``[y_j^{(k-1)/2} I_{k-1}(2 b sqrt(y_j)) / b^{k-1}]``."""
    n, b = cfg.n, cfg.b
    k = np.arange(n)
    ly = np.log(ym)[..., :, None]
    if b == 0.0:
        return k * ly - gammaln(k + 1)
    z = 2 * b * np.sqrt(ym)[..., :, None]
    li = np.stack([_log_iv(kk, z[..., 0]) for kk in k], axis=-1)
    return 0.5 * k * ly + li - k * math.log(b)


def _density_parts(cfg, Y):
    """Sign and log of the unnormalised density times ``b^{-n(n-1)/2}``.

    ``Y[..., l-1, j]`` is point ``j`` of level ``l``.
    """
    m, nu = cfg.m, cfg.nu_full
    b2 = cfg.b ** 2
    sign, total = _log_det(_level_m_entries(cfg, Y[..., m - 1, :]))
    top, low = Y[..., m - 1, :], Y[..., m - 2, :]
    E = -np.log(low)[..., None, :] - top[..., :, None] / low[..., None, :] - b2 * low[..., None, :]
    s, v = _log_det(E)
    sign, total = sign * s, total + v
    for l in range(1, m - 1):
        hi, lo = Y[..., l, :], Y[..., l - 1, :]
        a = nu[l + 1]
        E = (a * np.log(hi)[..., :, None] - (a + 1) * np.log(lo)[..., None, :]
             - hi[..., :, None] / lo[..., None, :])
        s, v = _log_det(E)
        sign, total = sign * s, total + v
    y1 = Y[..., 0, :]
    k = np.arange(cfg.n)
    E = (nu[1] + k) * np.log(y1)[..., :, None] - y1[..., :, None]
    s, v = _log_det(E)
    return sign * s, total + v


def log_normalization_closed_form(cfg: ModelConfig, drop_b: bool = False) -> float:
    """``log Z_{n,m}(b) = log[(n!)^m b^{n(n-1)/2} prod_j prod_{l=0}^{m-1} Gamma(j+nu_l)]``.

    With ``drop_b`` the power of ``b`` is left out.
    """
    n, m, nu = cfg.n, cfg.m, cfg.nu_full
    out = m * gammaln(n + 1)
    for j in range(1, n + 1):
        out += sum(gammaln(j + nu[l]) for l in range(m))
    if not drop_b and n > 1:
        if cfg.b == 0.0:
            return -math.inf
        out += 0.5 * n * (n - 1) * math.log(cfg.b)
    return float(out)


def _check_points(n, pts):
    if n > MAX_N:
        raise ConfigError(f"the oracle handles n <= {MAX_N}")
    for l in range(pts.shape[0]):
        row = np.sort(pts[l])
        if np.any(np.diff(row) <= COLLISION * np.maximum(1.0, row[1:])):
            raise DomainError(f"two points of level {l + 1} collide")


def log_joint_density(q: JointDensityQuery) -> float:
    """Log of the normalised joint density of all ``m n`` squared singular values.

    Raises
    ------
    DomainError
        On a collision within a level, where the density has a removable 0/0.
    SignError
        If the product of determinants is not positive.
    """
    cfg = q.cfg
    pts = q.points.points
    _check_points(cfg.n, pts)
    sign, lv = _density_parts(cfg, pts)
    if not (sign > 0 and np.isfinite(lv)):
        raise SignError("product of determinants is not positive")
    return float(lv - log_normalization_closed_form(cfg, drop_b=True))


def log_ginibre_density(nus: Sequence[int], points) -> float:
    """Normalised joint density of the uncoupled product of ``len(nus)`` Ginibre matrices.

    ``points[l-1]`` holds the level-``l`` points; the Vandermonde of the top
    level replaces the Bessel determinant.
    """
    nus = tuple(int(v) for v in nus)
    L = len(nus)
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] != L:
        raise ConfigError(f"need {L} levels of points")
    n = pts.shape[1]
    _check_points(n, pts)
    nu = (0,) + nus
    s, v = _ginibre_general(nus, pts)
    if not s > 0:
        raise SignError("product of determinants is not positive")
    lz = L * gammaln(n + 1) + sum(gammaln(j + nu[l]) for j in range(1, n + 1) for l in range(L + 1))
    return float(v - lz)


def _ginibre_general(nus, pts):
    L, n = len(nus), pts.shape[1]
    nu = (0,) + tuple(nus)
    k = np.arange(n)
    s, v = _log_det(k * np.log(pts[L - 1])[:, None])
    for l in range(1, L):
        hi, lo = pts[l], pts[l - 1]
        a = nu[l + 1]
        E = a * np.log(hi)[:, None] - (a + 1) * np.log(lo)[None, :] - hi[:, None] / lo[None, :]
        s2, v2 = _log_det(E)
        s, v = s * s2, v + v2
    E = (nu[1] + k) * np.log(pts[0])[:, None] - pts[0][:, None]
    s2, v2 = _log_det(E)
    return s * s2, v + v2


# ------------------------------------------------------------ top level only

def _psi_quadrature(cfg, k, y):
    # psi_k(y) = int G(nu_1+k-1, nu_2..nu_{m-1} | t) e^{-y/t - b^2 t} dt/t, t = e^s
    nu, m, b2 = cfg.nu_full, cfg.m, cfg.b ** 2
    params = (nu[1] + k - 1,) + tuple(nu[2:m])

    def f(s):
        t = math.exp(s)
        return math.exp(float(log_meijer_g(params, np.array([t]))[0]) - y / t - b2 * t)

    # e^{-y/t} kills t << y and the G function decays like exp(-t^{1/(m-1)})
    lo, hi = math.log(y) - 8.0, 12.0
    val, err = integrate.quad(f, lo, hi, epsabs=0, epsrel=1e-12, limit=400)
    return val


def _psi_contour(cfg, k, y, c=0.5):
    # Mellin-Barnes form on Re u = c; Gamma(u + nu_m) = Gamma(u) cancels 1/Gamma(u)
    nu, m, b = cfg.nu_full, cfg.m, cfg.b
    z = 2 * b * math.sqrt(y)

    def logf(v):
        u = complex(c, v)
        w = loggamma(u + nu[1] + k - 1)
        for l in range(2, m):
            w += loggamma(u + nu[l])
        w += math.log(2.0) + u * math.log(b * math.sqrt(y)) - u * math.log(y)
        w += complex(log_bessel_k(u, z))
        return w

    def f(v):
        return math.exp(logf(v).real) * math.cos(logf(v).imag)

    # integrand is conjugate-symmetric in v
    val, err = integrate.quad(f, 0, np.inf, epsabs=0, epsrel=1e-12, limit=400)
    return val / math.pi


def total_product_density(cfg: ModelConfig, ys: Sequence[float], route: str = "quadrature") -> float:
    """Normalised joint density of the top-level points only.

    ``route`` picks the representation of ``psi_k``: ``"quadrature"``
    integrates a Meijer G function against ``e^{-y/t - b^2 t}``;
    ``"contour"`` integrates the Mellin-Barnes form with a complex-order
    Bessel K.
    """
    ys = np.asarray(ys, dtype=float)
    n = cfg.n
    if ys.shape != (n,):
        raise ConfigError(f"need {n} points")
    if n > MAX_N:
        raise ConfigError(f"the oracle handles n <= {MAX_N}")
    if cfg.b <= 0:
        raise DomainError("the contour form of psi needs b > 0")
    if np.any(ys <= 0):
        raise DomainError("points must be positive")
    psi = {"quadrature": _psi_quadrature, "contour": _psi_contour}.get(route)
    if psi is None:
        raise ConfigError(f"unknown route {route!r}")
    s1, l1 = _log_det(_level_m_entries(cfg, ys))
    P = np.array([[psi(cfg, k, y) for y in ys] for k in range(1, n + 1)])
    d2 = _det(P)
    lz = log_normalization_closed_form(cfg, drop_b=True) - (cfg.m - 1) * gammaln(n + 1)
    return float(s1 * d2 * math.exp(l1 - lz))


# ------------------------------------------------------------ correlations

def _nodes(h, tau_max=4.0):
    tau = np.arange(-tau_max, tau_max + 0.5 * h, h)
    y = np.exp(np.sinh(tau))
    w = h * np.cosh(tau) * y
    return y, w


def brute_correlation(cfg: ModelConfig, points: Mapping[int, Sequence[float]],
                      rtol: float = 1e-8, h0: float = 0.2, max_level: int = 4) -> tuple[float, float]:
    """Correlation function by direct integration of the joint density.

    Parameters
    ----------
    points : mapping level -> fixed points on that level
    rtol : relative change between two step halvings that counts as converged

    Returns
    -------
    value, rel_error
    """
    n, m = cfg.n, cfg.m
    if n > 2 or m > 3:
        raise ConfigError("brute_correlation handles n <= 2 and m <= 3")
    fixed = {int(l): [float(v) for v in xs] for l, xs in points.items()}
    for l, xs in fixed.items():
        if not 1 <= l <= m or len(xs) > n:
            raise ConfigError(f"bad level {l} or too many points")
        if any(v <= 0 for v in xs):
            raise DomainError("points must be positive")
    free = [(l, j) for l in range(1, m + 1) for j in range(len(fixed.get(l, [])), n)]
    d = len(free)
    if d > MAX_DIM:
        raise ConfigError(f"quadrature dimension {d} exceeds {MAX_DIM}")
    pref = 1.0
    for l, xs in fixed.items():
        pref *= math.factorial(n) / math.factorial(n - len(xs))
    base = np.zeros((m, n))
    for l, xs in fixed.items():
        base[l - 1, :len(xs)] = xs
    lz = log_normalization_closed_form(cfg, drop_b=True)

    def estimate(h):
        y, w = _nodes(h)
        if d == 0:
            s, v = _density_parts(cfg, base)
            return float(s * math.exp(v - lz))
        total = 0.0
        # vectorise over all but the first free variable
        rest = np.meshgrid(*([y] * (d - 1)), indexing="ij")
        wrest = np.ones(1)
        for _ in range(d - 1):
            wrest = np.multiply.outer(wrest, w)
        wrest = wrest.ravel()
        for y0, w0 in zip(y, w):
            Y = np.broadcast_to(base, (wrest.size, m, n)).copy()
            l0, j0 = free[0]
            Y[:, l0 - 1, j0] = y0
            for (l, j), g in zip(free[1:], rest):
                Y[:, l - 1, j] = g.ravel()
            with np.errstate(over="ignore", invalid="ignore"):
                s, v = _density_parts(cfg, Y)
                vals = np.where(np.isfinite(v), s * np.exp(np.minimum(v - lz, 700.0)), 0.0)
            total += w0 * float(np.dot(vals, wrest))
        return total

    prev = estimate(h0)
    h = h0
    for _ in range(max_level):
        h /= 2
        cur = estimate(h)
        err = abs(cur - prev) / max(abs(cur), 1e-300)
        if err <= rtol:
            return pref * cur, err
        prev = cur
    raise QuadratureFailure(f"brute correlation did not converge (rel change {err:.3g})")


# ------------------------------------------------------------ Andreief

@dataclass
class AndreiefResult:
    lhs: float
    rhs: float

    @property
    def residual(self) -> float:
        return abs(self.lhs - self.rhs) / max(abs(self.rhs), 1e-300)


def andreief_check(phis: Sequence[Callable], psis: Sequence[Callable], h: float = 0.05,
                   tau_max: float = 4.0) -> AndreiefResult:
    """Compare ``int det[phi_i(x_j)] det[psi_j(x_k)] dx`` with ``n! det[int phi_i psi_j]``.

    Both sides use the same one-dimensional rule on ``(0, inf)``: the
    ``n``-fold integral as a tensor product, the moment matrix entrywise.
    """
    n = len(phis)
    if n != len(psis) or not 1 <= n <= MAX_N:
        raise ConfigError(f"need 1..{MAX_N} functions on each side")
    y, w = _nodes(h, tau_max)
    F = np.array([f(y) for f in phis])      # (n, N)
    G = np.array([g(y) for g in psis])
    moments = (F * w[None, :]) @ G.T
    rhs = math.factorial(n) * float(_det(moments))
    grids = np.meshgrid(*([np.arange(y.size)] * n), indexing="ij")
    idx = np.stack([g.ravel() for g in grids], axis=-1)   # (N^n, n)
    wt = np.prod(w[idx], axis=-1)
    A = F[:, idx].transpose(1, 0, 2)                       # phi_i(x_j)
    B = G[:, idx].transpose(1, 2, 0)                       # psi_j(x_k) indexed [k, j]
    lhs = float(np.sum(wt * _det(A) * _det(B)))
    return AndreiefResult(lhs, rhs)
