"""Integration contours and panelwise Gauss-Legendre quadrature.

A contour is a chain of straight segments.  Each segment is cut into panels
and every panel carries a fixed Gauss-Legendre rule; refinement doubles the
number of panels.  When two contours interact through a Cauchy factor
``1/(u - t)`` the panels are graded by the distance to the partner contour so
that the near-singular region is resolved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence, Union

import numpy as np

from .errors import QuadratureFailure, SeparationError

__all__ = [
    "VerticalLine",
    "RectangleLoop",
    "TruncatedInfiniteLoop",
    "ContourSpec",
    "QuadratureResult",
    "integrate_contour",
    "double_contour",
    "cauchy_double_contour",
    "sigma_n",
    "sigma_inf",
    "u_line",
    "contour_distance",
    "adapt_half_height",
    "adapt_right_cut",
    "log_integral_real_line",
]

MIN_SEPARATION = 0.05


@dataclass(frozen=True)
class VerticalLine:
    """Upward line ``Re u = c`` for ``|Im u| <= half_height``.

    ``tilt > 0`` bends both tails (beyond ``|Im u| = tilt_from``) into the
    left half plane by that angle; the path still runs from the lower tail
    to the upper one.
    """

    c: float
    half_height: float = 40.0
    tilt: float = 0.0
    tilt_from: float = 1.0


@dataclass(frozen=True)
class RectangleLoop:
    """Counter-clockwise rectangle ``[left, right] x [-h, h]``."""

    left: float
    right: float
    half_height: float = 0.5


@dataclass(frozen=True)
class TruncatedInfiniteLoop:
    """Loop around ``{0, 1, 2, ...}`` closed at ``Re t = right_cut``.

    Stands for a loop from ``+inf`` in the upper half plane back to ``+inf``
    in the lower one, truncated where the integrand is negligible.
    """

    left: float
    right_cut: float
    half_height: float = 0.5


Kind = Union[VerticalLine, RectangleLoop, TruncatedInfiniteLoop]


@dataclass(frozen=True)
class ContourSpec:
    kind: Kind
    panels_per_unit: int = 2
    nodes_per_panel: int = 16

    def __post_init__(self):
        if self.panels_per_unit < 1 or self.nodes_per_panel < 1:
            raise ValueError("panels_per_unit and nodes_per_panel must be positive")

    def segments(self) -> list[tuple[complex, complex]]:
        k = self.kind
        if isinstance(k, VerticalLine):
            c, T = k.c, k.half_height
            if k.tilt == 0.0 or T <= k.tilt_from:
                return [(complex(c, -T), complex(c, T))]
            t0 = k.tilt_from
            up = np.exp(1j * (np.pi / 2 + k.tilt))
            lo_start = complex(c, -t0) + (T - t0) * np.conj(up)
            hi_end = complex(c, t0) + (T - t0) * up
            return [(lo_start, complex(c, -t0)), (complex(c, -t0), complex(c, t0)),
                    (complex(c, t0), hi_end)]
        if isinstance(k, (RectangleLoop, TruncatedInfiniteLoop)):
            a = k.left
            b = k.right if isinstance(k, RectangleLoop) else k.right_cut
            h = k.half_height
            if not b > a or h <= 0:
                raise ValueError("degenerate loop")
            return [(complex(a, -h), complex(b, -h)), (complex(b, -h), complex(b, h)),
                    (complex(b, h), complex(a, h)), (complex(a, h), complex(a, -h))]
        raise TypeError(f"unknown contour kind {k!r}")

    def discretize(self, level: int = 0, partner: "ContourSpec | None" = None):
        """Nodes and complex weights (``dz`` included) at refinement ``level``.

        With a ``partner`` the panel length near each point is capped at half
        its distance to the partner, so Cauchy factors stay well resolved.
        """
        xg, wg = np.polynomial.legendre.leggauss(self.nodes_per_panel)
        hmax = 1.0 / self.panels_per_unit
        psegs = partner.segments() if partner is not None else None
        nodes, weights = [], []
        for z0, z1 in self.segments():
            L = abs(z1 - z0)
            if psegs is None:
                k = max(1, math.ceil(L * self.panels_per_unit))
                br = np.linspace(0.0, L, k * 2 ** level + 1)
            else:
                br = _graded_breaks(z0, z1, psegs, hmax, level)
            d = (z1 - z0) / L
            a, b = br[:-1], br[1:]
            mid, half = 0.5 * (a + b), 0.5 * (b - a)
            s = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
            w = (half[:, None] * wg[None, :]).ravel()
            nodes.append(z0 + d * s)
            weights.append(d * w)
        return np.concatenate(nodes), np.concatenate(weights)


def _graded_breaks(z0, z1, psegs, hmax, level):
    L = abs(z1 - z0)
    d = (z1 - z0) / L
    # distance profile on a fine probe grid, then march
    probe = np.linspace(0.0, L, max(2, int(L * 64) + 1))
    dist = _point_to_segments(z0 + d * probe, psegs)
    br = [0.0]
    s = 0.0
    while s < L:
        dl = np.interp(s, probe, dist)
        h = min(hmax, max(0.5 * dl, 0.005)) / 2 ** level
        s = min(L, s + h)
        if L - s < 0.25 * h:
            s = L
        br.append(s)
    return np.asarray(br)


def _point_to_segments(z, segs):
    z = np.asarray(z, dtype=complex)
    best = np.full(z.shape, np.inf)
    for a, b in segs:
        ab = b - a
        t = np.clip(((z - a) * np.conj(ab)).real / abs(ab) ** 2, 0.0, 1.0)
        best = np.minimum(best, np.abs(z - (a + t * ab)))
    return best


def contour_distance(spec_a: ContourSpec, spec_b: ContourSpec) -> float:
    """Minimum Euclidean distance between two contours."""
    segs_b = spec_b.segments()
    best = np.inf
    for a, b in spec_a.segments():
        pts = a + (b - a) * np.linspace(0.0, 1.0, max(2, int(abs(b - a) * 200) + 1))
        best = min(best, float(_point_to_segments(pts, segs_b).min()))
    return best


@dataclass
class QuadratureResult:
    value: complex
    error_estimate: float
    nodes_used: int
    extra: dict = field(default_factory=dict)


def integrate_contour(spec: ContourSpec, integrand: Callable, tol: float = 1e-12,
                      rtol: float = 1e-12, max_level: int = 5) -> QuadratureResult:
    """``int_C f(z) dz`` with panel doubling until two levels agree.

    ``integrand`` maps an array of complex nodes to an array of values.
    """
    prev = None
    for level in range(max_level + 1):
        z, w = spec.discretize(level)
        val = complex(np.sum(w * integrand(z)))
        if prev is not None:
            err = abs(val - prev)
            if err <= tol + rtol * abs(val):
                return QuadratureResult(val, err, z.size)
        prev = val
    raise QuadratureFailure(f"contour quadrature did not converge: last change {err:.3g} with {z.size} nodes")


def double_contour(spec_u: ContourSpec, spec_t: ContourSpec, integrand: Callable,
                   tol: float = 1e-10, rtol: float = 1e-10, max_level: int = 4,
                   min_separation: float = MIN_SEPARATION) -> QuadratureResult:
    """Tensor-product rule for ``int_{C_u} int_{C_t} f(u, t) dt du``.

    ``integrand(U, T)`` receives broadcastable arrays (``U`` a column, ``T`` a
    row).  The imaginary part of the result is stored in ``extra["imag"]``.
    """
    sep = contour_distance(spec_u, spec_t)
    if sep < min_separation * (1 - 1e-9):
        raise SeparationError(f"contours are {sep:.3g} apart, need {min_separation}")
    prev = None
    for level in range(max_level + 1):
        u, wu = spec_u.discretize(level, partner=spec_t)
        t, wt = spec_t.discretize(level, partner=spec_u)
        f = integrand(u[:, None], t[None, :])
        val = complex(wu @ f @ wt)
        if prev is not None:
            err = abs(val - prev)
            if err <= tol + rtol * abs(val):
                return QuadratureResult(val, err, u.size * t.size, {"imag": val.imag})
        prev = val
    raise QuadratureFailure(f"double contour quadrature did not converge: last change {err:.3g}")


def cauchy_double_contour(spec_u: ContourSpec, spec_t: ContourSpec,
                          log_fu: Callable, log_gt: Callable,
                          tol: float = 1e-13, rtol: float = 1e-10, max_level: int = 4,
                          min_separation: float = MIN_SEPARATION):
    """Separable double integral with a Cauchy factor.

    Computes, for every row ``x`` of ``log_gt`` and row ``y`` of ``log_fu``,

        S[x, y] = (2 pi i)^-2 int du int dt  F_y(u) G_x(t) / (u - t)

    where ``log_fu(u)`` returns ``log F`` with shape ``(n_y, len(u))`` and
    ``log_gt(t)`` returns ``log G`` with shape ``(n_x, len(t))``.  The
    exponentials are taken after subtracting each row's maximum.

    Returns
    -------
    values : ndarray (n_x, n_y) complex
    errors : ndarray (n_x, n_y) float
        Change between the last two refinement levels.
    nodes : int
    """
    sep = contour_distance(spec_u, spec_t)
    if sep < min_separation * (1 - 1e-9):
        raise SeparationError(f"contours are {sep:.3g} apart, need {min_separation}")
    prev = None
    for level in range(max_level + 1):
        u, wu = spec_u.discretize(level, partner=spec_t)
        t, wt = spec_t.discretize(level, partner=spec_u)
        lf = np.atleast_2d(log_fu(u))
        lg = np.atleast_2d(log_gt(t))
        mf = _row_shift(lf)
        mg = _row_shift(lg)
        A = np.exp(lf - mf[:, None]) * wu[None, :]
        B = np.exp(lg - mg[:, None]) * wt[None, :]
        C = 1.0 / (u[:, None] - t[None, :])
        S = (B @ C.T) @ A.T / (2j * np.pi) ** 2
        scale = mg[:, None] + mf[None, :]
        if np.any(scale > 700):
            from .errors import LogSpaceOverflow
            raise LogSpaceOverflow("double contour value overflows; supply a gauge shift")
        S = S * np.exp(scale)
        if prev is not None:
            err = np.abs(S - prev)
            if np.all(err <= tol + rtol * np.abs(S)):
                return S, err, u.size * t.size
        prev = S
    worst = float(np.max(err - rtol * np.abs(S)))
    raise QuadratureFailure(f"Cauchy double contour did not converge (excess error {worst:.3g})")


def _row_shift(lw):
    m = np.max(lw.real, axis=1)
    return np.where(np.isfinite(m), m, 0.0)


# ------------------------------------------------------------ standard shapes

def sigma_n(n: int, eps: float = 0.05, half_height: float = 0.5,
            panels_per_unit: int = 2, nodes_per_panel: int = 16) -> ContourSpec:
    """Rectangle enclosing ``0..n`` with left edge at ``-1/2 + eps``."""
    return ContourSpec(RectangleLoop(-0.5 + eps, n + 0.5, half_height), panels_per_unit, nodes_per_panel)


def sigma_inf(right_cut: float, eps: float = 0.05, half_height: float = 0.5,
              panels_per_unit: int = 2, nodes_per_panel: int = 16) -> ContourSpec:
    return ContourSpec(TruncatedInfiniteLoop(-0.5 + eps, right_cut, half_height),
                       panels_per_unit, nodes_per_panel)


def u_line(half_height: float = 40.0, tilt: float = 0.0,
           panels_per_unit: int = 1, nodes_per_panel: int = 16) -> ContourSpec:
    return ContourSpec(VerticalLine(-0.5, half_height, tilt), panels_per_unit, nodes_per_panel)


def _path_point(spec: ContourSpec, arc: np.ndarray, upper: bool) -> np.ndarray:
    # point at arc length ``arc`` from the centre of a (possibly tilted) line
    k = spec.kind
    out = np.empty(arc.shape, dtype=complex)
    straight = (k.tilt == 0.0) | (arc <= k.tilt_from)
    sgn = 1.0 if upper else -1.0
    out[straight] = k.c + 1j * sgn * arc[straight]
    tail = ~straight
    direction = np.exp(1j * (np.pi / 2 + k.tilt))
    if not upper:
        direction = np.conj(direction)
    out[tail] = k.c + 1j * sgn * k.tilt_from + (arc[tail] - k.tilt_from) * direction
    return out


def adapt_half_height(spec: ContourSpec, log_f: Callable, drop: float = 37.0,
                      start: float = 40.0, limit: float = 5000.0) -> ContourSpec:
    """Shrink or extend a vertical line so the tails sit ``drop`` e-folds below the peak."""
    T = start
    while True:
        arc = np.linspace(0.0, T, int(4 * T) + 1)
        vals = []
        for upper in (True, False):
            vals.append(np.atleast_2d(log_f(_path_point(spec, arc, upper))).real)
        lv = np.maximum(vals[0], vals[1])
        peak = lv.max(axis=1, keepdims=True)
        below = lv < peak - drop
        # last arc position where any row is still above the threshold
        above_any = ~np.all(below, axis=0)
        if not above_any[-1]:
            idx = np.flatnonzero(above_any)
            cut = arc[idx[-1] + 1] if idx.size else arc[1]
            return replace(spec, kind=replace(spec.kind, half_height=float(max(cut + 1.0, 2.0))))
        if T >= limit:
            raise QuadratureFailure("integrand on the vertical line does not decay")
        T *= 2.0


def adapt_right_cut(spec: ContourSpec, log_g: Callable, drop: float = 37.0,
                    start: int = 8, limit: int = 4000) -> ContourSpec:
    """Move the right edge of a truncated loop until the integrand there is negligible."""
    k = spec.kind
    h = k.half_height
    ys = np.linspace(-h, h, 9)
    M = start
    while True:
        xs = np.arange(0, M + 1) + 0.5
        pts = (xs[:, None] + 1j * ys[None, :]).ravel()
        lv = np.atleast_2d(log_g(pts)).real.reshape(-1, xs.size, ys.size).max(axis=2)
        peak = lv.max(axis=1, keepdims=True)
        ok = np.all(lv < peak - drop, axis=0)
        # first abscissa from which every later one is negligible
        tail = np.flatnonzero(~ok)
        last_bad = tail[-1] if tail.size else -1
        if last_bad < xs.size - 2:
            cut = xs[last_bad + 1] if last_bad >= 0 else xs[0]
            return replace(spec, kind=replace(k, right_cut=float(cut)))
        if M >= limit:
            raise QuadratureFailure("integrand on the truncated loop does not decay")
        M *= 2


# ------------------------------------------------------------ real half-line

def log_integral_real_line(log_f: Callable, lo: float = -12.0, hi: float = 12.0,
                           drop: float = 40.0, rtol: float = 1e-13, max_level: int = 10,
                           span_limit: float = 600.0) -> tuple[np.ndarray, np.ndarray]:
    """``log int_R exp(log_f(s)) ds`` for a batch of positive integrands.

    ``log_f(s)`` maps a 1-d array of abscissae to real logs of shape
    ``(rows, len(s))``.  Used after the substitution ``t = e^s`` for integrals
    over ``(0, inf)``: those integrands decay double exponentially in ``s``,
    so the trapezoidal rule converges geometrically once the window covers
    everything within ``drop`` e-folds of the peak.

    Returns
    -------
    log_value, rel_error : ndarray (rows,)
    """
    step = 0.125
    while True:
        s = np.arange(lo, hi + 0.5 * step, step)
        lv = np.atleast_2d(log_f(s))
        peak = lv.max(axis=1, keepdims=True)
        if not np.all(np.isfinite(peak)):
            raise QuadratureFailure("integrand is not finite on the probe window")
        live = np.any(lv > peak - drop, axis=0)
        grow_lo, grow_hi = live[0], live[-1]
        if not (grow_lo or grow_hi):
            idx = np.flatnonzero(live)
            lo, hi = s[max(idx[0] - 1, 0)], s[min(idx[-1] + 1, s.size - 1)]
            break
        if hi - lo > span_limit:
            raise QuadratureFailure("integrand does not decay on the real line")
        width = hi - lo
        lo -= width if grow_lo else 0.0
        hi += width if grow_hi else 0.0

    def tsum(h):
        n = max(2, int(math.ceil((hi - lo) / h)))
        x = np.linspace(lo, hi, n + 1)
        w = np.atleast_2d(log_f(x))
        m = w.max(axis=1, keepdims=True)
        e = np.exp(w - m)
        e[:, [0, -1]] *= 0.5
        return np.log(e.sum(axis=1) * (x[1] - x[0])) + m[:, 0]

    h = min(0.25, (hi - lo) / 16)
    prev = tsum(h)
    for _ in range(max_level):
        h *= 0.5
        cur = tsum(h)
        err = np.abs(np.expm1(cur - prev))
        if np.all(err <= rtol):
            return cur, err
        prev = cur
    raise QuadratureFailure(f"real-line quadrature did not converge (rel err {err.max():.3g})")
