"""
Exact geometry of the elliptical polynomial spiral

    S_{p,q} = { t^{-p} cos t + i t^{-q} sin t : t >= 2 pi },   0 < p <= q,

split into full turns S^k (parameter range [2 pi k, 2 pi (k+1))), together with
the concentric-ellipse family C_{p,q}.

Everything here is a pure function of its inputs.  Sampled arcs are immutable.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .errors import DomainError, PointBudgetExceeded

TWO_PI = 2.0 * math.pi
DEFAULT_POINT_BUDGET = 10**8

# Gauss-Legendre rule used for turn lengths and cumulative arc length.
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


@dataclass(frozen=True)
class SpiralParams:
    """Decay exponents of S_{p,q}: ``p`` along the major (x) axis, ``q`` along y."""

    p: float
    q: float

    def __post_init__(self):
        p, q = float(self.p), float(self.q)
        if not (math.isfinite(p) and math.isfinite(q)):
            raise DomainError(f"p and q must be finite, got p={p}, q={q}")
        if not 0 < p <= q:
            raise DomainError(f"need 0 < p <= q, got p={p}, q={q}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @property
    def slow(self) -> bool:
        """True in the regime p < 1, where the spiral has box dimension above 1."""
        return self.p < 1.0

    @property
    def hyperbolic(self) -> bool:
        return self.p == self.q

    def radii(self, k):
        """Semi-axes ``((2 pi k)^{-p}, (2 pi k)^{-q})`` of the ellipse matching turn ``k``."""
        tk = TWO_PI * np.asarray(k, dtype=float)
        return tk ** -self.p, tk ** -self.q


class PlanePoint(NamedTuple):
    x: float
    y: float


def _check_turn(k, name="k", minimum=1):
    if int(k) != k or k < minimum:
        raise DomainError(f"{name} must be an integer >= {minimum}, got {k}")
    return int(k)


def curve(params: SpiralParams, t):
    """Vectorised ``(x(t), y(t))``; no domain check."""
    t = np.asarray(t, dtype=float)
    return t ** -params.p * np.cos(t), t ** -params.q * np.sin(t)


def velocity(params: SpiralParams, t):
    t = np.asarray(t, dtype=float)
    p, q = params.p, params.q
    dx = -(t ** -p) * (np.sin(t) + p * np.cos(t) / t)
    dy = t ** -q * (np.cos(t) - q * np.sin(t) / t)
    return dx, dy


def speed(params: SpiralParams, t):
    return np.hypot(*velocity(params, t))


def point_at(params: SpiralParams, t: float) -> PlanePoint:
    """Point of S_{p,q} at parameter ``t >= 2 pi``."""
    if not t >= TWO_PI:
        raise DomainError(f"parameter must satisfy t >= 2*pi, got {t}")
    x, y = curve(params, t)
    return PlanePoint(float(x), float(y))


def turn_of(t):
    """Index ``k`` of the full turn containing parameter ``t``."""
    t = np.asarray(t, dtype=float)
    k = np.floor(t / TWO_PI)
    # the division can round across a turn boundary
    k = np.where(TWO_PI * k > t, k - 1, k)
    k = np.where(TWO_PI * (k + 1) <= t, k + 1, k)
    return k.astype(np.int64)


# --------------------------------------------------------------------------
# turn lengths and separations


def turn_length_bounds(params: SpiralParams, k: int) -> tuple[float, float]:
    """Bracket ``[(2k pi)^{-p}, 8 (2k pi)^{-p}]`` for the length of turn ``k``.

    The turn sits in the square of side ``2 (2k pi)^{-p}`` and winds once around
    the origin, which gives both sides.
    """
    k = _check_turn(k)
    a = (TWO_PI * k) ** -params.p
    return a, 8.0 * a


def turn_length(params: SpiralParams, k) -> np.ndarray:
    """Numerical length of turn(s) ``k`` by composite Gauss-Legendre quadrature.

    Relative error is below 1e-5; it is largest when q >> p, where the speed
    is nearly ``|x'|`` and has sharp corners at the zeros of ``x'``.
    """
    k = np.atleast_1d(np.asarray(k, dtype=float))
    sub = 8
    edges = TWO_PI * (k[:, None] + np.arange(sub + 1)[None, :] / sub)
    lo, hi = edges[:, :-1], edges[:, 1:]
    half = 0.5 * (hi - lo)
    nodes = (0.5 * (hi + lo))[..., None] + half[..., None] * _GL_NODES
    vals = speed(params, nodes) @ _GL_WEIGHTS
    return (vals * half).sum(axis=1)


def turn_length_sum(params: SpiralParams, M: int, N: int) -> float:
    """Comparison quantity for the total length of turns ``M..N``.

    Returns ``(N^{1-p} - M^{1-p})/(1-p)`` for p < 1, ``log N - log M`` for
    p = 1 and ``(M^{1-p} - N^{1-p})/(p-1)`` for p > 1.  The true sum of turn
    lengths is comparable to this up to p-dependent constants.
    """
    M = _check_turn(M, "M")
    N = _check_turn(N, "N")
    if M >= N:
        raise DomainError(f"need M < N, got M={M}, N={N}")
    p = params.p
    if p == 1.0:
        return math.log(N) - math.log(M)
    return (N ** (1.0 - p) - M ** (1.0 - p)) / (1.0 - p)


def turn_gap_lower_bound(params: SpiralParams, k: int, M: int) -> float:
    """Uniform lower bound ``q / M^{1+q}`` on the gap between turns ``k-1`` and ``k``.

    Valid (up to constants depending on p and q) for ``2 <= k <= M``.
    """
    k = _check_turn(k, minimum=2)
    M = _check_turn(M, "M", minimum=2)
    if k > M:
        raise DomainError(f"need k <= M, got k={k}, M={M}")
    return params.q / M ** (1.0 + params.q)


def turn_gap_per_turn(params: SpiralParams, k: int) -> float:
    """Sharper per-turn gap bound ``q / k^{1+q}``."""
    k = _check_turn(k, minimum=2)
    return params.q / k ** (1.0 + params.q)


# --------------------------------------------------------------------------
# sampled polylines


@dataclass(frozen=True, eq=False)
class SampledArc:
    """Polyline samples ``(t, x, y)`` with every chord at most ``max_chord``."""

    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    max_chord: float

    def __post_init__(self):
        arrays = [np.array(a, dtype=float) for a in (self.t, self.x, self.y)]
        if not arrays[0].size or any(a.shape != arrays[0].shape or a.ndim != 1 for a in arrays):
            raise ValueError("t, x, y must be nonempty 1-d arrays of equal length")
        if not self.max_chord > 0:
            raise ValueError("max_chord must be positive")
        for name, a in zip("txy", arrays):
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    def __len__(self):
        return self.t.size

    @property
    def points(self) -> np.ndarray:
        return np.column_stack([self.x, self.y])

    def chords(self) -> np.ndarray:
        return np.hypot(np.diff(self.x), np.diff(self.y))

    def length(self) -> float:
        return float(self.chords().sum())

    def select(self, mask) -> "SampledArc":
        return SampledArc(self.t[mask], self.x[mask], self.y[mask], self.max_chord)

    # serialisation -------------------------------------------------------

    def to_csv(self, dest=None) -> str:
        """CSV with header ``t,x,y``; written to ``dest`` when given, always returned."""
        buf = io.StringIO()
        np.savetxt(buf, np.column_stack([self.t, self.x, self.y]), fmt="%.17g",
                   delimiter=",", header="t,x,y", comments="")
        text = buf.getvalue()
        if dest is not None:
            Path(dest).write_text(text)
        return text

    @classmethod
    def from_csv(cls, source, max_chord: float) -> "SampledArc":
        data = np.loadtxt(source, delimiter=",", skiprows=1, ndmin=2)
        return cls(data[:, 0], data[:, 1], data[:, 2], max_chord)

    def to_bytes(self) -> bytes:
        """Little-endian float64 ``(t, x, y)`` triples, one per point."""
        return np.column_stack([self.t, self.x, self.y]).astype("<f8").tobytes()

    @classmethod
    def from_bytes(cls, blob: bytes, max_chord: float) -> "SampledArc":
        data = np.frombuffer(blob, dtype="<f8").reshape(-1, 3)
        return cls(data[:, 0], data[:, 1], data[:, 2], max_chord)


def _turn_speed_bound(params: SpiralParams, k):
    # |x'| <= t^-p (1 + p/t), |y'| <= t^-q (1 + q/t), both decreasing in t
    tk = TWO_PI * np.asarray(k, dtype=float)
    bx = tk ** -params.p * (1.0 + params.p / tk)
    by = tk ** -params.q * (1.0 + params.q / tk)
    return np.hypot(bx, by)


def _uniform_blocks(starts, widths, counts, closing, budget):
    counts = np.asarray(counts, dtype=np.int64)
    total = int(counts.sum()) + 1
    if total > budget:
        raise PointBudgetExceeded(f"{total} points requested, budget is {budget}")
    offsets = np.concatenate([[0], np.cumsum(counts)[:-1]])
    local = np.arange(total - 1) - np.repeat(offsets, counts)
    t = np.repeat(starts, counts) + local * np.repeat(widths / counts, counts)
    return np.append(t, closing)


def sample_spiral(params: SpiralParams, k_min: int, k_max: int, max_chord: float,
                  point_budget: int = DEFAULT_POINT_BUDGET) -> SampledArc:
    """Polyline through turns ``k_min..k_max`` with every chord at most ``max_chord``.

    Turn ``k`` is sampled uniformly in ``t`` with step ``max_chord / v_k``, where
    ``v_k`` bounds the speed on that turn, so the step grows like ``k^p``.
    """
    k_min = _check_turn(k_min, "k_min")
    k_max = _check_turn(k_max, "k_max")
    if k_min > k_max:
        raise DomainError(f"need k_min <= k_max, got {k_min} > {k_max}")
    if not max_chord > 0:
        raise DomainError("max_chord must be positive")
    ks = np.arange(k_min, k_max + 1)
    counts = np.ceil(TWO_PI * _turn_speed_bound(params, ks) / max_chord)
    t = _uniform_blocks(TWO_PI * ks, np.full(ks.size, TWO_PI), counts,
                        TWO_PI * (k_max + 1), point_budget)
    x, y = curve(params, t)
    return SampledArc(t, x, y, max_chord)


def ellipse_family_points(params: SpiralParams, n_max: int, max_chord: float,
                          point_budget: int = DEFAULT_POINT_BUDGET) -> SampledArc:
    """Samples of the ellipses ``E((2 pi n)^{-p}, (2 pi n)^{-q})``, ``n = 1..n_max``.

    Ellipse ``n`` is parameterised by angle ``u`` and stored with
    ``t = 2 pi n + u``, so ``turn_of(t)`` recovers ``n``.  Each ellipse is
    closed (its first point is repeated); the jump from one ellipse to the
    next is not a chord of the curve and is excluded from ``max_chord``.
    """
    n_max = _check_turn(n_max, "n_max")
    if not max_chord > 0:
        raise DomainError("max_chord must be positive")
    ns = np.arange(1, n_max + 1)
    a, b = params.radii(ns)
    counts = np.ceil(TWO_PI * a / max_chord).astype(np.int64) + 1
    total = int(counts.sum())
    if total > point_budget:
        raise PointBudgetExceeded(f"{total} points requested, budget is {point_budget}")
    offsets = np.concatenate([[0], np.cumsum(counts)[:-1]])
    local = np.arange(total) - np.repeat(offsets, counts)
    u = local * np.repeat(TWO_PI / (counts - 1), counts)
    u = np.minimum(u, TWO_PI * (1 - 1e-15))
    aa, bb = np.repeat(a, counts), np.repeat(b, counts)
    start = np.repeat(TWO_PI * ns, counts)
    # keep the closing point of ellipse n inside [2 pi n, 2 pi (n+1))
    t = np.minimum(start + u, np.nextafter(start + TWO_PI, 0.0))
    return SampledArc(t, aa * np.cos(u), bb * np.sin(u), max_chord)


# --------------------------------------------------------------------------
# monotone decomposition and arc length


def _fixed_point(base, shift, iters=40):
    t = base.copy()
    for _ in range(iters):
        t = base - np.arctan(shift / t)
    return t


def monotone_breaks(params: SpiralParams, t_start: float, t_end: float) -> np.ndarray:
    """Sorted parameters splitting ``[t_start, t_end]`` into pieces on which both
    coordinates are monotone.

    ``x' = 0`` where ``tan t = -p/t`` (near multiples of pi) and ``y' = 0`` where
    ``cot t = q/t`` (near odd multiples of pi/2); the roots are found by
    fixed-point iteration.
    """
    n_lo = math.floor(t_start / math.pi) - 1
    n_hi = math.ceil(t_end / math.pi) + 2
    n = np.arange(max(n_lo, 1), n_hi, dtype=float)
    tx = _fixed_point(n * math.pi, params.p)
    ty = _fixed_point(n * math.pi + 0.5 * math.pi, params.q)
    inner = np.concatenate([tx, ty])
    inner = inner[(inner > t_start) & (inner < t_end)]
    return np.unique(np.concatenate([[t_start], inner, [t_end]]))


def level_crossing(fn, t0, t1, level, iters=64):
    """Vectorised bisection for ``fn(t) = level`` on ``[t0, t1]`` where ``fn`` is
    monotone and ``level`` lies between the endpoint values."""
    t0 = np.array(t0, dtype=float)
    t1 = np.array(t1, dtype=float)
    level = np.broadcast_to(np.asarray(level, dtype=float), t0.shape)
    rising = fn(t1) >= fn(t0)
    for _ in range(iters):
        mid = 0.5 * (t0 + t1)
        above = fn(mid) >= level
        go_left = above == rising
        t1 = np.where(go_left, mid, t1)
        t0 = np.where(go_left, t0, mid)
    return 0.5 * (t0 + t1)


def _inside_interval(fn, t0, t1, v0, v1, lo, hi):
    # parameter interval on which the monotone fn lies in [lo, hi]
    rising = v1 >= v0
    vmin, vmax = np.minimum(v0, v1), np.maximum(v0, v1)
    empty = (vmax < lo) | (vmin > hi)
    enter_lvl = np.where(rising, lo, hi)
    exit_lvl = np.where(rising, hi, lo)
    enter_ok = np.where(rising, v0 >= lo, v0 <= hi)
    exit_ok = np.where(rising, v1 <= hi, v1 >= lo)
    need_a = ~empty & ~enter_ok
    need_b = ~empty & ~exit_ok
    ta, tb = t0.copy(), t1.copy()
    if need_a.any():
        ta[need_a] = level_crossing(fn, t0[need_a], t1[need_a], enter_lvl[need_a])
    if need_b.any():
        tb[need_b] = level_crossing(fn, t0[need_b], t1[need_b], exit_lvl[need_b])
    return ta, tb, empty


def clip_pieces(params: SpiralParams, t0, t1, box):
    """Clip monotone pieces ``[t0_i, t1_i]`` to ``box = (xlo, xhi, ylo, yhi)``.

    Returns ``(ta, tb, hit)``: on a piece monotone in both coordinates the
    set of parameters inside an axis-aligned box is a single interval.
    """
    xlo, xhi, ylo, yhi = box
    t0 = np.asarray(t0, dtype=float)
    t1 = np.asarray(t1, dtype=float)
    x0, y0 = curve(params, t0)
    x1, y1 = curve(params, t1)
    fx = lambda s: curve(params, s)[0]
    fy = lambda s: curve(params, s)[1]
    xa, xb, xe = _inside_interval(fx, t0, t1, x0, x1, xlo, xhi)
    ya, yb, ye = _inside_interval(fy, t0, t1, y0, y1, ylo, yhi)
    ta = np.maximum(xa, ya)
    tb = np.minimum(xb, yb)
    hit = ~xe & ~ye & (ta <= tb)
    return ta, tb, hit


class ArcLength:
    """Cumulative arc length ``s(t)`` from ``t_start``, as a Hermite spline whose
    slopes are the exact speed.  Knot intervals are integrated by Gauss-Legendre."""

    def __init__(self, params: SpiralParams, t_start: float, t_end: float, knots_per_turn: int = 128):
        n = max(2, int(math.ceil((t_end - t_start) / TWO_PI * knots_per_turn)) + 1)
        knots = np.linspace(t_start, t_end, n)
        lo, hi = knots[:-1], knots[1:]
        half = 0.5 * (hi - lo)
        nodes = (0.5 * (hi + lo))[:, None] + half[:, None] * _GL_NODES
        pieces = (speed(params, nodes) @ _GL_WEIGHTS) * half
        cum = np.concatenate([[0.0], np.cumsum(pieces)])
        self._spline = CubicHermiteSpline(knots, cum, speed(params, knots))
        self.t_start, self.t_end = t_start, t_end

    def __call__(self, t):
        return self._spline(t)

    def between(self, ta, tb):
        return self._spline(tb) - self._spline(ta)
