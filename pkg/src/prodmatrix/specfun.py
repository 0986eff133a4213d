"""Overflow-safe special functions on the contours used by the kernels.

Everything here works in log space internally: a complex number ``w`` stands
for ``exp(w)``, so the real part is the log-modulus and the imaginary part a
phase.  Public scalar helpers wrap the vectorised ``log_*`` routines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import digamma

from .errors import DomainError, LogSpaceOverflow, NonConvergence, PoleError, QuadratureFailure

__all__ = [
    "LogComplex",
    "log_gamma",
    "loggamma",
    "log_rgamma",
    "log_sin_pi",
    "bessel_i",
    "bessel_k",
    "log_bessel_i",
    "log_bessel_k",
    "meijer_g_m0",
    "meijer_g",
    "log_meijer_g",
    "logsumexp_complex",
]

LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
LOG_PI = math.log(math.pi)
_EXP_MAX = 709.78

# Godfrey's coefficients for g = 607/128, 15 terms.
_LANCZOS_G = 607.0 / 128.0
_LANCZOS_C = np.array([
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
])


@dataclass(frozen=True)
class LogComplex:
    """A complex number stored as ``exp(log_modulus + i*phase)``.

    Multiplication and division act on the fields directly, so long products
    of Gamma factors never leave log space until :meth:`value` is called.
    """

    log_modulus: float
    phase: float

    def __post_init__(self):
        ph = math.remainder(float(self.phase), 2.0 * math.pi)
        if ph <= -math.pi:
            ph += 2.0 * math.pi
        object.__setattr__(self, "phase", ph)
        object.__setattr__(self, "log_modulus", float(self.log_modulus))

    @classmethod
    def from_log(cls, w: complex) -> "LogComplex":
        w = complex(w)
        return cls(w.real, w.imag)

    @classmethod
    def from_complex(cls, z: complex) -> "LogComplex":
        z = complex(z)
        if z == 0:
            return cls(-math.inf, 0.0)
        return cls(math.log(abs(z)), math.atan2(z.imag, z.real))

    def to_log(self) -> complex:
        return complex(self.log_modulus, self.phase)

    def __mul__(self, other: "LogComplex") -> "LogComplex":
        return LogComplex(self.log_modulus + other.log_modulus, self.phase + other.phase)

    def __truediv__(self, other: "LogComplex") -> "LogComplex":
        return LogComplex(self.log_modulus - other.log_modulus, self.phase - other.phase)

    def __pow__(self, k: int) -> "LogComplex":
        return LogComplex(k * self.log_modulus, k * self.phase)

    def conjugate(self) -> "LogComplex":
        return LogComplex(self.log_modulus, -self.phase)

    def value(self) -> complex:
        """Exponentiate; raises :class:`LogSpaceOverflow` instead of returning inf."""
        if self.log_modulus > _EXP_MAX:
            raise LogSpaceOverflow(f"|value| = exp({self.log_modulus:.6g}) overflows double precision")
        return complex(math.exp(self.log_modulus) * math.cos(self.phase),
                       math.exp(self.log_modulus) * math.sin(self.phase))


def logsumexp_complex(w, axis=0):
    """``log(sum(exp(w)))`` along ``axis`` for complex log-values ``w``.

    Entries with real part ``-inf`` are exact zeros.  A sum that is exactly
    zero comes back as ``-inf``.
    """
    w = np.asarray(w, dtype=complex)
    m = np.max(w.real, axis=axis, keepdims=True)
    m = np.where(np.isfinite(m), m, 0.0)
    with np.errstate(under="ignore"):
        s = np.sum(np.exp(w - m), axis=axis, keepdims=True)
    with np.errstate(divide="ignore"):
        out = np.log(s) + m
    return np.squeeze(out, axis=axis)


def _lanczos(z):
    zm = z - 1.0
    s = np.full(zm.shape, _LANCZOS_C[0], dtype=complex)
    for k in range(1, _LANCZOS_C.size):
        s = s + _LANCZOS_C[k] / (zm + k)
    t = zm + _LANCZOS_G + 0.5
    return LOG_SQRT_2PI + (zm + 0.5) * np.log(t) - t + np.log(s)


def log_sin_pi(z):
    """``log(sin(pi*z))`` without overflow for large ``|Im z|``.

    The argument is first reduced by the nearest integer so that zeros near
    integers keep full relative accuracy.
    """
    z = np.asarray(z, dtype=complex)
    k = np.rint(z.real)
    f = z - k
    out = np.empty(z.shape, dtype=complex)
    small = np.abs(f.imag) < 15.0
    with np.errstate(divide="ignore"):
        out[small] = np.log(np.sin(np.pi * f[small]))
    big = ~small
    if np.any(big):
        fb = f[big]
        up = fb.imag > 0
        g = np.where(up, fb, np.conj(fb))
        # sin(pi g) = (i/2) e^{-i pi g} (1 - e^{2 i pi g}), |e^{2 i pi g}| < 1
        lg = np.log(0.5j) - 1j * np.pi * g + np.log1p(-np.exp(2j * np.pi * g))
        out[big] = np.where(up, lg, np.conj(lg))
    return out + 1j * np.pi * k


def _pole_mask(z):
    r = np.rint(z.real)
    return (r <= 0) & (np.abs(z - r) < 1e-12)


def loggamma(z, at_pole: str = "raise"):
    """Vectorised complex ``log Gamma(z)`` (Lanczos plus reflection).

    The imaginary part is a valid phase but not necessarily the principal
    branch of ``log Gamma``; only ``exp`` of the result is meaningful.

    Parameters
    ----------
    z : array_like of complex
    at_pole : {"raise", "ninf"}
        Poles at non-positive integers either raise :class:`PoleError` or
        give ``-inf`` in the returned *negative* log (see :func:`log_rgamma`).
    """
    z = np.asarray(z, dtype=complex)
    out = np.empty(z.shape, dtype=complex)
    poles = _pole_mask(z)
    if np.any(poles):
        if at_pole == "raise":
            raise PoleError(f"Gamma has a pole at {z[poles].ravel()[0]}")
        out[poles] = np.inf
    refl = (z.real < 0.5) & ~poles
    direct = ~refl & ~poles
    out[direct] = _lanczos(z[direct])
    if np.any(refl):
        zr = z[refl]
        out[refl] = LOG_PI - log_sin_pi(zr) - _lanczos(1.0 - zr)
    return out


def log_rgamma(z):
    """``log(1/Gamma(z))`` with ``-inf`` at the poles (1/Gamma is entire)."""
    return -loggamma(z, at_pole="ninf")


def log_gamma(z) -> LogComplex:
    """Complex log-Gamma as a :class:`LogComplex`.

    Raises
    ------
    PoleError
        If ``z`` is within 1e-12 of a non-positive integer.
    """
    w = complex(loggamma(np.array([complex(z)]))[0])
    if not (math.isfinite(w.real) and math.isfinite(w.imag)):
        raise DomainError(f"log Gamma not finite at {z}")
    return LogComplex.from_log(w)


# ---------------------------------------------------------------- Bessel I

def log_bessel_i(order, arg, max_terms: int = 10_000):
    """``log I_order(arg)`` from the ascending power series.

    ``order`` may be complex, ``arg`` real and non-negative; both broadcast.
    Terms whose denominator Gamma sits at a pole vanish, which for integer
    negative orders is the same as using ``I_{-N} = I_N``; that reflection is
    applied up front so the term recurrence never divides by zero.
    """
    mu, z = np.broadcast_arrays(np.asarray(order, dtype=complex), np.asarray(arg, dtype=float))
    mu = mu.astype(complex).ravel().copy()
    z = z.astype(float).ravel()
    if np.any(z < 0) or not np.all(np.isfinite(z)):
        raise DomainError("bessel_i needs a finite argument >= 0")
    shape = np.broadcast(np.asarray(order), np.asarray(arg)).shape
    neg_int = (np.abs(mu.imag) < 1e-12) & (mu.real < 0) & (np.abs(mu.real - np.rint(mu.real)) < 1e-12)
    mu[neg_int] = -np.rint(mu[neg_int].real)
    out = np.empty(mu.shape, dtype=complex)

    zero = z == 0
    if np.any(zero):
        mz = mu[zero]
        is0 = np.abs(mz) < 1e-15
        if np.any(~is0 & (mz.real <= 0)):
            raise DomainError("I_mu(0) is infinite for Re(mu) <= 0, mu != 0")
        out[zero] = np.where(is0, 0.0, -np.inf)

    pos = ~zero
    if np.any(pos):
        out[pos] = _log_i_series(mu[pos], z[pos], max_terms)
    return out.reshape(shape)


def _log_i_series(mu, z, max_terms, chunk: int = 64):
    lhalf = np.log(0.5 * z)
    first = mu * lhalf + log_rgamma(mu + 1.0)
    acc = first.copy()              # running log of the partial sum
    last = first.copy()             # log of the most recent term
    done = np.zeros(mu.shape, dtype=bool)
    k0 = 0
    while not np.all(done):
        if k0 >= max_terms:
            raise NonConvergence(f"I series did not converge within {max_terms} terms")
        idx = np.flatnonzero(~done)
        ks = np.arange(k0 + 1, k0 + chunk + 1, dtype=float)
        step = 2.0 * lhalf[idx, None] - np.log(ks)[None, :] - np.log(mu[idx, None] + ks[None, :])
        terms = last[idx, None] + np.cumsum(step, axis=1)
        acc[idx] = logsumexp_complex(np.concatenate([acc[idx, None], terms], axis=1), axis=1)
        last[idx] = terms[:, -1]
        # past the peak (ratio < 1) and below 1e-17 of the partial sum
        ratio_ok = step[:, -1].real < 0
        small = terms[:, -1].real < acc[idx].real - 39.2
        done[idx] = ratio_ok & small | ~np.isfinite(acc[idx].real)
        k0 += chunk
    return acc


def bessel_i(order, arg: float) -> complex:
    """Modified Bessel function of the first kind, ``I_order(arg)``."""
    w = complex(log_bessel_i(complex(order), float(arg)))
    return complex(LogComplex.from_log(w).value()) if math.isfinite(w.real) else 0j


# ---------------------------------------------------------------- Bessel K

def log_bessel_k(order, arg, scaled: bool = False, rtol: float = 1e-14, max_level: int = 6):
    """``log K_order(arg)`` (or ``log(e^arg K)`` when ``scaled``).

    Orders with a sizeable imaginary part go through the reflection formula
    in terms of ``I_{+-order}`` when that is well conditioned.  Otherwise it uses the integral ``K_k(2z) = z^k/2 * int t^{-k-1} exp(-t - z^2/t) dt``
    after ``t = z e^s``, i.e. ``K_k(Z) = 1/2 int exp(-k s - Z cosh s) ds``
    over the real line.  The integrand decays double exponentially, so the
    trapezoidal rule converges geometrically; the step is halved until two
    successive sums agree to ``rtol`` relative to the integral of the
    modulus.
    """
    kap, z = np.broadcast_arrays(np.asarray(order, dtype=complex), np.asarray(arg, dtype=float))
    shape = kap.shape
    kap = kap.astype(complex).ravel()
    z = z.astype(float).ravel()
    if np.any(z <= 0) or not np.all(np.isfinite(z)):
        raise DomainError("bessel_k needs a finite argument > 0")
    out = np.empty(kap.shape, dtype=complex)
    done = np.zeros(kap.shape, dtype=bool)
    cand = np.abs(kap.imag) >= _REFLECT_MIN_IMAG
    if np.any(cand):
        idx = np.flatnonzero(cand)
        val, ok = _log_k_reflection(kap[idx], z[idx])
        out[idx[ok]] = val[ok] + z[idx[ok]]
        done[idx[ok]] = True
    rest = np.flatnonzero(~done)
    block = 4096
    for a in range(0, rest.size, block):
        sl = rest[a:a + block]
        out[sl] = _log_k_block(kap[sl], z[sl], rtol, max_level)
    if not scaled:
        out = out - z
    return out.reshape(shape)


# orders with |Im| below this go to the integral: sin(pi*kappa) may be small
_REFLECT_MIN_IMAG = 2.0


def _log_k_reflection(kap, z):
    """``K = pi/(2 sin(pi k)) (I_{-k} - I_k)`` for non-real orders.

    Returns ``(log K, ok)``.  An entry is ``ok`` when both I series are
    summed without losing more than two digits to cancellation among their
    terms, and the difference of the two reflected terms loses at most two
    more.  Everything else is left to the integral route.
    """
    ok = z <= 2.0 * np.abs(kap.imag) + 8.0
    out = np.zeros(kap.shape, dtype=complex)
    if not np.any(ok):
        return out, ok
    k, zz = kap[ok], z[ok]
    pre = math.log(math.pi / 2) - log_sin_pi(k)
    l1, c1 = _log_i_series_checked(-k, zz)
    l2, c2 = _log_i_series_checked(k, zz)
    w1, w2 = pre + l1, pre + l2
    d = np.exp(w2 - w1)
    keep = (np.abs(1.0 - d) >= 1e-2) & (c1 < 1e2) & (c2 < 1e2)
    out[ok] = w1 + np.log(1.0 - d)
    flag = ok.copy()
    flag[ok] = keep
    return out, flag


def _log_i_series_checked(mu, z, max_terms: int = 2000):
    # ascending series with the condition number sum|t_k| / |sum t_k|
    lhalf = np.log(0.5 * z)
    term = mu * lhalf + log_rgamma(mu + 1.0)
    scale = term.real.copy()
    acc = np.exp(term - scale)
    mod = np.abs(acc)
    last = term
    for kk in range(1, max_terms + 1):
        last = last + 2.0 * lhalf - math.log(kk) - np.log(mu + kk)
        t = np.exp(last - scale)
        acc = acc + t
        mod = mod + np.abs(t)
        if kk > 2 and np.all((np.abs(t) < 1e-17 * mod) & (np.log(np.abs(mu + kk)) + math.log(kk) > 2.0 * lhalf)):
            break
        # rescale when the terms have grown far beyond the running scale
        big = mod > 1e150
        if np.any(big):
            acc[big] *= 1e-150
            mod[big] *= 1e-150
            scale[big] += 150 * math.log(10.0)
    with np.errstate(divide="ignore"):
        cond = mod / np.abs(acc)
        return np.log(acc) + scale, cond


def _log_k_bounds(ka, z, drop=46.0):
    # log-modulus f(s) = -ka*s - z*(cosh s - 1) is concave with peak at s*
    s_star = -np.arcsinh(ka / z)
    f_star = -ka * s_star - z * 2.0 * np.sinh(0.5 * s_star) ** 2

    def f(s):
        return -ka * s - z * 2.0 * np.sinh(0.5 * s) ** 2

    def solve(direction):
        lo = s_star.copy()
        step = np.ones_like(lo)
        hi = lo + direction * step
        for _ in range(200):
            bad = f(hi) > f_star - drop
            if not np.any(bad):
                break
            step = np.where(bad, 2 * step, step)
            hi = np.where(bad, s_star + direction * step, hi)
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            above = f(mid) > f_star - drop
            lo = np.where(above, mid, lo)
            hi = np.where(above, hi, mid)
        return hi

    return solve(-1.0), solve(1.0), f_star


def _log_k_block(kap, z, rtol, max_level):
    # Shift the line to s + i*sigma through the saddle.  With Im(kappa) = b
    # the modulus gains a factor e^{b sigma} and loses decay Z(1 - cos sigma);
    # for kappa = ib the saddle has sin(sigma) = |b|/Z (capped), which
    # captures the e^{-pi|b|/2} size of K_{ib}.
    ka, kb = kap.real, kap.imag
    # keep sigma a distance delta below pi/2: the cancellation left over is
    # e^{|b| delta}, the strip available to the trapezoidal rule is delta
    delta = np.clip(4.0 / np.maximum(np.abs(kb), 1e-300), 0.02, 0.17)
    # the saddle of -kappa s - Z cosh s sits at Im s = -Im arcsinh(kappa / Z)
    sig = np.clip(-np.arcsinh(kap / z).imag, -(np.pi / 2 - delta), np.pi / 2 - delta)
    zc = z * np.cos(sig)
    left, right, _ = _log_k_bounds(ka, zc)
    width = right - left
    edge = np.maximum(np.cosh(left), np.cosh(right))
    freq = np.abs(kb) + z * np.abs(np.sin(sig)) * edge
    strip = np.pi / 2 - np.abs(sig)
    h0 = np.minimum(2.0 * np.pi / (freq + 40.0), 2.0 * np.pi * strip / 40.0)
    # start one level coarser than the estimate; the first refinement reaches it
    need = np.maximum(32, np.ceil(0.5 * width / h0))
    # entries needing similar node counts share one trapezoid grid
    bucket = np.ceil(np.log2(need)).astype(int)
    out = np.empty(kap.shape, dtype=complex)
    for bk in np.unique(bucket):
        idx = np.flatnonzero(bucket == bk)
        out[idx] = _log_k_trapezoid(kap[idx], z[idx], sig[idx], left[idx], width[idx],
                                    2 ** int(bk), rtol, max_level)
    return out


def _log_k_trapezoid(kap, z, sig, left, width, n, rtol, max_level):
    def values(v):
        # cosh(s) - 1 written as 2 sinh(s/2)^2 to avoid cancellation at large z
        s = left[:, None] + width[:, None] * v[None, :] + 1j * sig[:, None]
        return -kap[:, None] * s - z[:, None] * 2.0 * np.sinh(0.5 * s) ** 2

    lf = values(np.linspace(0.0, 1.0, n + 1))
    m = lf.real.max(axis=1)
    e = np.exp(lf - m[:, None])
    e[:, 0] *= 0.5
    e[:, -1] *= 0.5
    total, mod = e.sum(axis=1), np.abs(e).sum(axis=1)
    prev = total * (width / n)
    out = np.empty(kap.shape, dtype=complex)
    live = np.ones(kap.shape, dtype=bool)
    for _ in range(max_level):
        # refinement adds the midpoints; the earlier nodes are reused
        mids = (np.arange(n) + 0.5) / n
        e = np.exp(values(mids) - m[:, None])
        total = total + e.sum(axis=1)
        mod = mod + np.abs(e).sum(axis=1)
        n *= 2
        cur = total * (width / n)
        err = np.abs(cur - prev)
        # rounding in the running sums sets a floor near eps * sqrt(n)
        tol = max(rtol, 8.0 * np.finfo(float).eps * math.sqrt(n))
        # a row is frozen once converged so later rounding cannot undo it
        conv = live & (err <= tol * mod * (width / n))
        out[conv] = np.log(0.5 * cur[conv]) + m[conv]
        live &= ~conv
        if not np.any(live):
            return out
        prev = cur
    worst = float(np.max((err / (mod * width / n))[live]))
    raise QuadratureFailure(f"K quadrature relative error {worst:.3g} after {n} nodes")


def bessel_k(order, arg: float) -> complex:
    """Modified Bessel function of the second kind, ``K_order(arg)``, ``arg > 0``."""
    w = complex(log_bessel_k(complex(order), float(arg)))
    return LogComplex.from_log(w).value()


# ---------------------------------------------------------------- Meijer G

def _mb_shift(nus, y):
    """Line position ``c`` for the Mellin-Barnes integral of G^{k,0}_{0,k}.

    The real saddle of ``sum log Gamma(c+nu_j) - c log y`` keeps the integrand
    modulus close to the value of G.  ``c`` is kept at least 1/2 to the right
    of the rightmost pole ``-min(nu)``.
    """
    floor = -np.min(nus) + 0.5
    ly = np.log(y)
    lo = np.full(y.shape, -np.min(nus) + 1e-6)
    hi = np.full(y.shape, max(1.0, floor) + 1.0)

    def g(c):
        return digamma(c[..., None] + nus).sum(axis=-1) - ly

    while np.any(g(hi) < 0):
        hi = np.where(g(hi) < 0, 2.0 * hi + 1.0, hi)
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        neg = g(mid) < 0
        lo = np.where(neg, mid, lo)
        hi = np.where(neg, hi, mid)
    return np.maximum(0.5 * (lo + hi), floor)


def meijer_g_m0(params, y, rtol: float = 1e-13, max_level: int = 5, log: bool = False):
    """``G^{k,0}_{0,k}(-; nu_1..nu_k | y)`` by Mellin-Barnes quadrature.

    The vertical line ``Re u = c`` carries
    ``(1/2pi) int prod Gamma(c+i tau+nu_j) y^{-c-i tau} dtau``; the integrand is
    conjugate-symmetric in ``tau`` so only ``tau >= 0`` is summed.  The line is
    cut where the modulus drops below 1e-16 of its peak and the trapezoidal
    step is halved until two sums agree.

    Parameters
    ----------
    params : sequence of float
        The lower parameters ``nu_1..nu_k``.
    y : float or array of float, > 0
    log : bool
        Return ``log G`` instead (the function is positive on ``y > 0``).
    """
    nus = np.asarray(params, dtype=float).ravel()
    if nus.size == 0 or not np.all(np.isfinite(nus)):
        raise DomainError("meijer_g_m0 needs at least one finite parameter")
    ya = np.asarray(y, dtype=float)
    if np.any(ya <= 0) or not np.all(np.isfinite(ya)):
        raise DomainError("meijer_g_m0 needs y > 0")
    yv = ya.ravel()
    out = np.empty(yv.shape)
    block = 256
    for a in range(0, yv.size, block):
        out[a:a + block] = _mb_block(nus, yv[a:a + block], rtol, max_level)
    out = np.exp(out) if not log else out
    return out.reshape(ya.shape) if ya.ndim else float(out[0])


def _mb_logf(nus, c, ly, tau):
    u = c[:, None] + 1j * tau[None, :]
    lf = -u * ly[:, None]
    for nu in nus:
        lf = lf + loggamma(u + nu)
    return lf


def _mb_block(nus, y, rtol, max_level):
    c = _mb_shift(nus, y)
    ly = np.log(y)
    k = nus.size
    # cut the line where the modulus falls 37 e-folds below its peak
    T = 40.0
    while True:
        probe = np.linspace(0.0, T, int(4 * T) + 1)
        lp = _mb_logf(nus, c, ly, probe).real
        tail = lp[:, -1] < lp.max(axis=1) - 37.0
        if np.all(tail) or T > 2000:
            break
        T *= 2.0
    if not np.all(tail):
        raise QuadratureFailure("Mellin-Barnes integrand does not decay on the line")
    d = np.min(c + np.min(nus))             # distance to the nearest pole
    h = min(0.25, 2.0 * np.pi * d / (45.0 + np.max(np.abs(ly)) * min(d, 1.0) + 2 * k))

    def tsum(step):
        n = int(np.ceil(T / step))
        tau = np.linspace(0.0, n * step, n + 1)
        lf = _mb_logf(nus, c, ly, tau)
        m = lf.real.max(axis=1, keepdims=True)
        e = np.exp(lf - m)
        e[:, 0] *= 0.5
        return e.real.sum(axis=1) * step / np.pi, np.abs(e).sum(axis=1) * step / np.pi, m[:, 0]

    # sums are relative to exp(m), the peak modulus on the line
    prev, _, _ = tsum(h)
    for _ in range(max_level):
        h *= 0.5
        cur, mod, m = tsum(h)
        err = np.abs(cur - prev)
        if np.all(err <= rtol * np.abs(cur) + 1e-15 * mod):
            if np.any(cur <= 0):
                raise QuadratureFailure("Meijer G value lost to cancellation on the line")
            return np.log(cur) + m
        prev = cur
    raise QuadratureFailure(f"Meijer G quadrature did not converge (rel err {np.max(err / np.abs(cur)):.3g})")


def log_meijer_g(params, y):
    """``log G^{k,0}_{0,k}(-; params | y)`` using closed forms for ``k <= 2``.

    ``k = 1`` is ``y^nu e^{-y}`` and ``k = 2`` is
    ``2 y^{(a+b)/2} K_{a-b}(2 sqrt y)``; larger ``k`` falls back to
    :func:`meijer_g_m0`.
    """
    nus = [float(v) for v in params]
    if not nus:
        raise DomainError("meijer_g needs at least one parameter")
    ya = np.asarray(y, dtype=float)
    if np.any(ya <= 0) or not np.all(np.isfinite(ya)):
        raise DomainError("meijer_g needs finite y > 0")
    if len(nus) == 1:
        out = nus[0] * np.log(ya) - ya
    elif len(nus) == 2:
        a, b2 = nus
        lk = log_bessel_k(a - b2, 2.0 * np.sqrt(ya)).real
        out = math.log(2.0) + 0.5 * (a + b2) * np.log(ya) + lk
    else:
        return meijer_g_m0(nus, ya, log=True)
    return out if ya.ndim else float(out)


def meijer_g(params, y):
    """``G^{k,0}_{0,k}(-; params | y)``; see :func:`log_meijer_g`."""
    out = np.exp(log_meijer_g(params, y))
    return out if np.ndim(out) else float(out)
