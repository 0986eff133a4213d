"""Self-checks grouped into suites, each returning a list of :class:`Check`.

The suites back ``prodmatrix validate``; every check compares a computed
quantity with an independent value and records the worst deviation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .contours import log_integral_real_line
from .errors import QuadratureFailure
from .kernel_finite import (
    hankel_system,
    kernel_contour_grid,
    kernel_ginibre_finite_grid,
    kernel_sum_grid,
)
from .kernel_limit import (
    Strong,
    Weak,
    bessel_kernel_closed_form,
    coupling_sequence,
    delta_mass_check,
    kernel_ginibre_infinite_grid,
    verify_scaling_limit,
)
from .model import ModelConfig, RngStream, empirical_density, sample_configurations
from .specfun import log_bessel_i, log_bessel_k, loggamma, meijer_g_m0

__all__ = [
    "Check",
    "SUITES",
    "run_suite",
    "check_i_integral",
    "check_gexp",
    "check_k_symmetry",
    "check_sum_gamma",
    "check_k_small_b",
    "check_hankel",
    "check_mc_density",
    "level_density_bins",
]


@dataclass
class Check:
    name: str
    value: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.value) and self.value < self.tolerance)


# ------------------------------------------------------------ special functions

def check_i_integral(js=range(1, 9), bs=(0.3, 1.0, 2.5), xs=(0.5, 1.7)) -> Check:
    """``int_0^inf e^{-y/x} y^{(j-1)/2} I_{j-1}(2b sqrt y) dy = x^j b^{j-1} e^{b^2 x}``."""
    worst = 0.0
    for j in js:
        for b in bs:
            for x in xs:
                def log_f(s):
                    y = np.exp(s)
                    li = log_bessel_i(j - 1, 2 * b * np.sqrt(y)).real
                    return (s - y / x + 0.5 * (j - 1) * s + li)[None, :]

                lv, _ = log_integral_real_line(log_f)
                exact = j * math.log(x) + (j - 1) * math.log(b) + b * b * x
                worst = max(worst, abs(math.expm1(lv[0] - exact)))
    return Check("I-integral identity (j <= 8)", worst, 1e-8)


def check_gexp(nus=(0.0, 0.5, 2.0, 3.5), xs=np.geomspace(0.05, 20, 17)) -> Check:
    """One-parameter Meijer G by Mellin-Barnes quadrature against ``x^nu e^{-x}``."""
    worst = 0.0
    for nu in nus:
        g = meijer_g_m0([nu], xs)
        worst = max(worst, float(np.max(np.abs(g - xs ** nu * np.exp(-xs)) / np.maximum(1.0, g))))
    return Check("G(nu|x) = x^nu e^-x", worst, 1e-10)


def check_k_symmetry(seed: int = 7, count: int = 60) -> Check:
    """``K_u(z) = K_{-u}(z)`` for random complex ``u``."""
    gen = np.random.default_rng(seed)
    u = gen.uniform(-6, 6, count) + 1j * gen.uniform(-30, 30, count)
    z = gen.uniform(0.1, 15, count)
    a = log_bessel_k(u, z)
    b = log_bessel_k(-u, z)
    diff = np.abs(np.exp(a - b) - 1.0)
    return Check("K_u = K_-u", float(diff.max()), 1e-10)


def check_sum_gamma(seed: int = 11, count: int = 50) -> Check:
    """``sum_{p<n} G(t-p)/G(u-p) = [G(t-n+1)/G(u-n) - G(t+1)/G(u)] / (u-t-1)``."""
    gen = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(count):
        n = int(gen.integers(1, 12))
        t = complex(gen.uniform(-3, 8), gen.uniform(0.2, 3))
        u = complex(gen.uniform(-3, 8), gen.uniform(-3, -0.2))
        p = np.arange(n)
        lhs = np.sum(np.exp(loggamma(t - p) - loggamma(u - p)))
        r1 = np.exp(loggamma(np.array([t - n + 1]))[0] - loggamma(np.array([u - n]))[0])
        r2 = np.exp(loggamma(np.array([t + 1]))[0] - loggamma(np.array([u]))[0])
        rhs = (r1 - r2) / (u - t - 1)
        scale = max(abs(rhs), np.max(np.abs(np.exp(loggamma(t - p) - loggamma(u - p)))))
        worst = max(worst, abs(lhs - rhs) / scale)
    return Check("finite sum of Gamma ratios", worst, 1e-10)


def check_k_small_b(b: float = 1e-7) -> Check:
    """``2 (b sqrt y)^u K_u(2 b sqrt y) / Gamma(u) -> 1`` as ``b -> 0`` for ``Re u > 0``."""
    worst = 0.0
    for u in (1.5 + 2j, 2.0, 3.2 - 1j):
        for y in (0.3, 2.0):
            z = b * math.sqrt(y)
            w = math.log(2.0) + u * math.log(z) + complex(log_bessel_k(u, 2 * z)) - complex(loggamma(np.array([u]))[0])
            worst = max(worst, abs(np.exp(w) - 1.0))
    return Check("small-b limit of the K weight", worst, 1e-6)


# ------------------------------------------------------------ Hankel system

def check_hankel(max_n: int = 12) -> list:
    out = []
    worst = 0.0
    for n in (1, 2, 3, 5, 8, max_n):
        for m, nus in ((2, (0,)), (3, (1, 2)), (4, (0, 3, 1))):
            for b in (0.5, 1.25):
                worst = max(worst, hankel_system(ModelConfig(n, m, nus, b)).residual())
    out.append(Check("A C = I, exact (n <= 12)", worst, 1e-10))
    # dense solve as an independent inverse where A is well conditioned
    worst = 0.0
    for n in (2, 3, 4):
        h = hankel_system(ModelConfig(n, 3, (1, 0), 0.75))
        inv = np.linalg.solve(h.a, np.eye(n))
        worst = max(worst, float(np.max(np.abs(inv - h.c)) / np.max(np.abs(h.c))))
    out.append(Check("C against dense solve (n <= 4)", worst, 1e-10))
    return out


# ------------------------------------------------------------ kernels

def _rel(a, b):
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300)))


def check_kernels() -> list:
    xs = np.array([0.4, 1.1, 2.6])
    worst = 0.0
    for n, m, nus, b in ((3, 2, (1,), 0.5), (4, 3, (1, 0), 1.2), (2, 4, (0, 1, 2), 0.3)):
        cfg = ModelConfig(n, m, nus, b)
        for r in range(1, m + 1):
            for s in range(1, m + 1):
                a, _ = kernel_sum_grid(r, s, xs, xs, cfg)
                c, _, _ = kernel_contour_grid(r, s, xs, xs, cfg)
                scale = np.max(np.abs(c))
                worst = max(worst, float(np.max(np.abs(a - c)) / scale))
    out = [Check("sum route = contour route", worst, 1e-6)]
    cfg = ModelConfig(3, 2, (1,), 1e-4)
    a, _ = kernel_sum_grid(2, 2, xs, xs, cfg)
    g, _, _ = kernel_ginibre_finite_grid(2, 2, xs, xs, 3, (1, 0))
    out.append(Check("b -> 0 gives the uncoupled kernel", _rel(a, g), 1e-3))
    worst = 0.0
    for nu in (0, 1, 2):
        k, _ = kernel_ginibre_infinite_grid(1, 1, xs, xs, (nu,))
        bes = 4 * bessel_kernel_closed_form(nu, 4 * xs[:, None], 4 * xs[None, :])
        gauge = (xs[None, :] / xs[:, None]) ** (nu / 2)
        worst = max(worst, _rel(k, gauge * bes))
    out.append(Check("level-1 limit = Bessel kernel", worst, 1e-8))
    return out


# ------------------------------------------------------------ Monte Carlo

def _bin_averages(cfg, level, a, b, nodes):
    xg, wg = np.polynomial.legendre.leggauss(nodes)
    xs = (0.5 * (a + b)[:, None] + 0.5 * (b - a)[:, None] * xg[None, :]).ravel()
    out = np.empty(xs.size)
    for i in range(0, xs.size, 16):
        chunk = xs[i:i + 16]
        v, _ = kernel_sum_grid(level, level, chunk, chunk, cfg)
        out[i:i + 16] = np.diag(v)
    return (out.reshape(a.size, nodes) * wg[None, :]).sum(axis=1) / 2.0


def level_density_bins(cfg: ModelConfig, level: int, edges, nodes: int = 8,
                       rtol: float = 1e-9, max_nodes: int = 128) -> np.ndarray:
    """Bin averages of ``K(l,x;l,x)`` by Gauss-Legendre quadrature on each bin.

    The node count doubles until two successive rules agree to ``rtol``;
    bins next to the origin need this when the density is singular there.
    """
    edges = np.asarray(edges, dtype=float)
    a, b = edges[:-1], edges[1:]
    cur = _bin_averages(cfg, level, a, b, nodes)
    while nodes < max_nodes:
        nodes *= 2
        nxt = _bin_averages(cfg, level, a, b, nodes)
        done = np.max(np.abs(nxt - cur)) <= rtol * np.max(np.abs(nxt))
        cur = nxt
        if done:
            return cur
    raise QuadratureFailure(f"bin averages not converged with {max_nodes} nodes")


def check_mc_density(cfg: ModelConfig, samples: int, seed: int = 1, bins: int = 20,
                     lo: float = 0.01, hi: float = 4.0, sigmas: float = 3.0) -> list:
    """Histogram of every level against the one-point density ``K(l,x;l,x)``.

    Level ``l`` is binned on ``[lo, hi] * n * s_l`` where ``s_l`` is the
    mean of the sampled level-``l`` points divided by ``n``, so each level's
    bulk falls inside the window.
    """
    data = sample_configurations(cfg, samples, RngStream(seed))
    out = []
    for level in range(1, cfg.m + 1):
        scale = float(np.mean(data[:, level - 1, :]))
        edges = np.linspace(lo * scale, hi * scale, bins + 1)
        dens, se = empirical_density(data, level, edges)
        ref = level_density_bins(cfg, level, edges)
        z = np.abs(dens - ref) / np.maximum(se, 1e-300)
        out.append(Check(f"MC level {level}: max |z| over {bins} bins", float(z.max()), sigmas))
    return out


# ------------------------------------------------------------ suites

def _specfun():
    return [check_i_integral(), check_gexp(), check_k_symmetry(), check_sum_gamma(), check_k_small_b()]


def _mc():
    return check_mc_density(ModelConfig(2, 2, (1,), 0.5), 20000, seed=3)


def _limits():
    rep = verify_scaling_limit(Weak(), 2, 2, [0.5, 1.0, 2.0], [0.5, 1.0, 2.0])
    out = [Check("weak regime: decreasing distances", 0.0 if rep.monotone else 1.0, 0.5),
           Check("weak regime: final distance", rep.distances[-1], 5e-2)]
    rep = verify_scaling_limit(Strong(), 2, 2, [0.5, 1.0, 1.5], [0.5, 1.0, 1.5])
    out.append(Check("strong regime: final distance", rep.distances[-1], 5e-2))
    mass = delta_mass_check([ModelConfig(100, 2, (1,), 1000.0)], 1.0)[0]
    out.append(Check("contact term mass at b^2/n = 1e4", abs(mass - 1.0), 1e-3))
    return out


SUITES: dict[str, Callable[[], list]] = {
    "specfun": _specfun,
    "hankel": check_hankel,
    "kernels": check_kernels,
    "mc": _mc,
    "limits": _limits,
}


def run_suite(name: str) -> list:
    """Run one suite (or ``"all"``) and return its checks."""
    if name == "all":
        out = []
        for key in SUITES:
            out += [Check(f"{key}: {c.name}", c.value, c.tolerance) for c in SUITES[key]()]
        return out
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}")
    return SUITES[name]()
