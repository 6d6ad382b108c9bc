"""
Constructive covers of S_{p,q} and the estimators built on them.

Counts are grid counts: the number of cells of an origin-anchored grid of side
``delta`` met by the set.  Two counting engines are provided.

``sampled``
    union of the cells containing the points of a :class:`SampledArc` whose
    chords are at most ``delta / 2``.
``traversal``
    exact count along the curve itself.  The curve is cut into pieces on which
    both coordinates are monotone; such a piece visits
    ``|Δ floor(x/δ)| + |Δ floor(y/δ)| + 1`` cells, so no sampling is needed and
    the cost is independent of ``delta``.

Turns that are no longer ``delta``-separated (index at least the vertical
window index ``L_q``) are replaced by the rectangle that contains them, as in
the upper-bound covers of the dimension proofs.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from . import formulas
from .errors import ConvergenceError, DomainError
from .geometry import (
    DEFAULT_POINT_BUDGET,
    TWO_PI,
    ArcLength,
    SampledArc,
    SpiralParams,
    clip_pieces,
    curve,
    level_crossing,
    monotone_breaks,
    sample_spiral,
    turn_length,
    turn_length_sum,
    turn_of,
)

_KEY_SHIFT = np.int64(1 << 32)
_KEY_OFFSET = np.int64(1 << 31)


# --------------------------------------------------------------------------
# ladders and regression


def loglog_fit(ratios, counts):
    """Least-squares fit of ``log count`` against ``log ratio``: ``(slope, intercept, r2)``."""
    x = np.log(np.asarray(ratios, dtype=float))
    y = np.log(np.asarray(counts, dtype=float))
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - float((resid ** 2).sum()) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), min(max(r2, 0.0), 1.0)


@dataclass(frozen=True)
class CoverLadder:
    """Cover counts along a geometric ladder of scales.

    ``ratios`` holds the scale ratio each count is regressed against:
    ``1/delta`` for global counts, ``delta^theta / delta`` for localized ones.
    """

    deltas: tuple
    counts: tuple
    ratios: tuple
    fit: tuple = field(init=False)

    def __post_init__(self):
        d = np.asarray(self.deltas, dtype=float)
        if d.size < 2 or np.any(np.diff(d) >= 0):
            raise ValueError("deltas must be strictly decreasing with at least two entries")
        if any(c <= 0 for c in self.counts):
            raise ValueError("counts must be positive")
        object.__setattr__(self, "fit", loglog_fit(self.ratios, self.counts))

    @property
    def slope(self) -> float:
        return self.fit[0]

    @property
    def r2(self) -> float:
        return self.fit[2]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["delta", "count", "log_ratio"])
        for d, c, r in zip(self.deltas, self.counts, self.ratios):
            w.writerow([repr(float(d)), int(c), repr(math.log(c) / math.log(r))])
        return buf.getvalue()

    def to_dict(self) -> dict:
        slope, intercept, r2 = self.fit
        return {
            "deltas": [float(d) for d in self.deltas],
            "counts": [int(c) for c in self.counts],
            "ratios": [float(r) for r in self.ratios],
            "slope": slope,
            "intercept": intercept,
            "r2": r2,
        }


def geometric_ladder(delta_min: float, delta_max: float, levels: int) -> np.ndarray:
    """``levels`` scales from ``delta_max`` down to ``delta_min``, equally spaced in log."""
    if not 0 < delta_min < delta_max < 1:
        raise DomainError(f"need 0 < delta_min < delta_max < 1, got {delta_min}, {delta_max}")
    if levels < 2:
        raise DomainError("need at least two levels")
    # base 2 keeps dyadic ladders exact
    return 2.0 ** np.linspace(math.log2(delta_max), math.log2(delta_min), levels)


def dyadic_ladder(hi_exp: int, lo_exp: int) -> np.ndarray:
    """``2^-hi_exp, ..., 2^-lo_exp`` (one level per power of two)."""
    return 2.0 ** -np.arange(hi_exp, lo_exp + 1, dtype=float)


# --------------------------------------------------------------------------
# grid counting


def _cell_keys(x, y, delta, anchor):
    ix = np.floor((x - anchor[0]) / delta).astype(np.int64)
    iy = np.floor((y - anchor[1]) / delta).astype(np.int64)
    return (ix + _KEY_OFFSET) * _KEY_SHIFT + (iy + _KEY_OFFSET)


def _rect_cells(x0, x1, y0, y1, delta, anchor=(0.0, 0.0)):
    """Number of grid cells meeting the closed rectangle ``[x0,x1] x [y0,y1]``."""
    if x1 < x0 or y1 < y0:
        return 0
    nx = math.floor((x1 - anchor[0]) / delta) - math.floor((x0 - anchor[0]) / delta) + 1
    ny = math.floor((y1 - anchor[1]) / delta) - math.floor((y0 - anchor[1]) / delta) + 1
    return int(nx) * int(ny)


def grid_box_count(arc: SampledArc, delta: float, anchor=(0.0, 0.0)) -> int:
    """Distinct cells of side ``delta`` containing a sample of ``arc``.

    Requires ``arc.max_chord <= delta / 2`` so that consecutive samples lie in
    the same or neighbouring cells.
    """
    if not delta > 0:
        raise DomainError("delta must be positive")
    if arc.max_chord > delta / 2:
        raise DomainError(f"arc.max_chord={arc.max_chord} exceeds delta/2={delta / 2}")
    return int(np.unique(_cell_keys(arc.x, arc.y, delta, anchor)).size)


@dataclass(frozen=True)
class WindowIndices:
    """Turn indices delimiting the localized covers at scale ``delta`` and window ``delta^theta``.

    ``L_p``/``L_q``: last turns still ``delta``-separated on the horizontal /
    vertical axis.  ``l_p``/``l_q``: first turns inside the window on that axis.
    """

    L_p: int
    L_q: int
    l_p: int
    l_q: int


_OFFSET_P = math.pi
_OFFSET_Q = 1.5 * math.pi


def _axis_gap(L, exponent, offset):
    # (c + 2 pi L)^-t - (c + 2 pi (L+1))^-t, cancellation-free
    base = offset + TWO_PI * L
    return base ** -exponent * -math.expm1(-exponent * math.log1p(TWO_PI / base))


def separation_index(exponent: float, offset: float, delta: float) -> int:
    """Largest ``L >= 1`` with ``delta <= (c + 2 pi L)^-t - (c + 2 pi (L+1))^-t``."""
    t, c = exponent, offset
    guess = ((TWO_PI * t / delta) ** (1.0 / (1.0 + t)) - c) / TWO_PI
    L = max(1, int(guess))
    while _axis_gap(L + 1, t, c) >= delta:
        L += 1
    while L >= 1 and _axis_gap(L, t, c) < delta:
        L -= 1
    if L < 1:
        raise DomainError(f"delta={delta} exceeds every turn separation")
    return L


def entry_index(exponent: float, offset: float, radius: float) -> int:
    """Smallest ``l >= 1`` with ``(c + 2 pi l)^-t <= radius``."""
    t, c = exponent, offset
    l = max(1, math.ceil((radius ** (-1.0 / t) - c) / TWO_PI))
    while l > 1 and (c + TWO_PI * (l - 1)) ** -t <= radius:
        l -= 1
    while (c + TWO_PI * l) ** -t > radius:
        l += 1
    return l


def window_indices(params: SpiralParams, delta: float, theta: float) -> WindowIndices:
    if not 0 < delta < 1:
        raise DomainError(f"need 0 < delta < 1, got {delta}")
    if not 0 <= theta < 1:
        raise DomainError(f"need 0 <= theta < 1, got {theta}")
    radius = delta ** theta
    return WindowIndices(
        L_p=separation_index(params.p, _OFFSET_P, delta),
        L_q=separation_index(params.q, _OFFSET_Q, delta),
        l_p=entry_index(params.p, _OFFSET_P, radius),
        l_q=entry_index(params.q, _OFFSET_Q, radius),
    )


def _crossings(params, ta, tb, delta, anchor):
    xa, ya = curve(params, ta)
    xb, yb = curve(params, tb)
    fx = lambda v: np.floor((v - anchor[0]) / delta)
    fy = lambda v: np.floor((v - anchor[1]) / delta)
    return np.abs(fx(xb) - fx(xa)) + np.abs(fy(yb) - fy(ya))


def traversal_count(params: SpiralParams, t_start: float, t_end: float, delta: float,
                    window=None, hole=None, anchor=(0.0, 0.0)) -> int:
    """Cells visited by the curve on ``[t_start, t_end]``.

    ``window`` and ``hole`` are boxes ``(xlo, xhi, ylo, yhi)``: only the part
    inside ``window`` is counted and cells reached from inside ``hole`` are
    assumed to be counted elsewhere.  Cells shared between distinct passes of
    the curve are counted once per pass.
    """
    if t_end <= t_start:
        return 0
    breaks = monotone_breaks(params, t_start, t_end)
    t0, t1 = breaks[:-1], breaks[1:]
    if window is None:
        wa, wb, whit = t0.copy(), t1.copy(), np.ones(t0.shape, bool)
    else:
        wa, wb, whit = clip_pieces(params, t0, t1, window)

    if hole is None:
        total = _crossings(params, wa[whit], wb[whit], delta, anchor).sum() + whit.sum()
        free_start = whit & (wa == t0)
        free_end = whit & (wb == t1)
    else:
        ra, rb, rhit = clip_pieces(params, wa, wb, hole)
        rhit &= whit
        plain = whit & ~rhit
        total = _crossings(params, wa[plain], wb[plain], delta, anchor).sum() + plain.sum()
        # segments before and after the hole, each attached to it at one end
        before = rhit & (ra > wa)
        after = rhit & (wb > rb)
        total += _crossings(params, wa[before], ra[before], delta, anchor).sum()
        total += _crossings(params, rb[after], wb[after], delta, anchor).sum()
        free_start = plain & (wa == t0) | before & (wa == t0)
        free_end = plain & (wb == t1) | after & (wb == t1)
    shared = int(np.count_nonzero(free_end[:-1] & free_start[1:]))
    return int(total) - shared


def _core_box(params, cutoff):
    a = (TWO_PI * cutoff) ** -params.p
    b = (TWO_PI * cutoff) ** -params.q
    return (-a, a, -b, b)


def _intersect(box, window):
    if window is None:
        return box
    return (max(box[0], window[0]), min(box[1], window[1]),
            max(box[2], window[2]), min(box[3], window[3]))


def spiral_cover_count(params: SpiralParams, delta: float, *, window=None, cutoff=None,
                       method="traversal", arc: SampledArc | None = None,
                       anchor=(0.0, 0.0)) -> int:
    """Grid count of ``S_{p,q}`` (optionally inside ``window``) at scale ``delta``.

    Turns ``k >= cutoff`` (default ``L_q``) are replaced by their enclosing
    rectangle; turns ``1 .. cutoff-1`` are counted with ``method``.  For
    ``method="sampled"`` an ``arc`` covering those turns with chords at most
    ``delta/2`` may be supplied (otherwise one is sampled).
    """
    if cutoff is None:
        cutoff = separation_index(params.q, _OFFSET_Q, delta)
    cutoff = max(int(cutoff), 1)
    core = _core_box(params, cutoff)
    core_w = _intersect(core, window)
    n_core = _rect_cells(*core_w, delta, anchor)
    if cutoff == 1:
        return n_core

    t_end = TWO_PI * cutoff
    if method == "traversal":
        return n_core + traversal_count(params, TWO_PI, t_end, delta, window=window,
                                        hole=core, anchor=anchor)
    if method != "sampled":
        raise ValueError(f"unknown counting method {method!r}")

    if arc is None:
        arc = sample_spiral(params, 1, cutoff - 1, delta / 2)
    if arc.max_chord > delta / 2:
        raise DomainError(f"arc.max_chord={arc.max_chord} exceeds delta/2={delta / 2}")
    keep = arc.t <= t_end
    x, y = arc.x[keep], arc.y[keep]
    if window is not None:
        inside = (x >= window[0]) & (x <= window[1]) & (y >= window[2]) & (y <= window[3])
        x, y = x[inside], y[inside]
    ix = np.floor((x - anchor[0]) / delta)
    iy = np.floor((y - anchor[1]) / delta)
    if n_core:
        cx0, cx1 = math.floor((core_w[0] - anchor[0]) / delta), math.floor((core_w[1] - anchor[0]) / delta)
        cy0, cy1 = math.floor((core_w[2] - anchor[1]) / delta), math.floor((core_w[3] - anchor[1]) / delta)
        outside = (ix < cx0) | (ix > cx1) | (iy < cy0) | (iy > cy1)
        x, y = x[outside], y[outside]
    return n_core + int(np.unique(_cell_keys(x, y, delta, anchor)).size)


# --------------------------------------------------------------------------
# box dimension


def estimate_box_dimension(params: SpiralParams, delta_min: float, delta_max: float,
                           levels: int, *, method="sampled", max_chord: float | None = None,
                           anchor=(0.0, 0.0), point_budget: int = DEFAULT_POINT_BUDGET) -> CoverLadder:
    """Regression slope of grid counts over a geometric ladder of scales.

    With ``method="sampled"`` one polyline with chord ``max_chord`` (default
    ``delta_min/2``) is drawn through turns below ``L_q(delta_min)`` and reused
    at every level.
    """
    if levels < 4:
        raise DomainError("need at least four levels")
    deltas = geometric_ladder(delta_min, delta_max, levels)
    cutoffs = [separation_index(params.q, _OFFSET_Q, d) for d in deltas]
    arc = None
    if method == "sampled":
        chord = delta_min / 2 if max_chord is None else max_chord
        if max(cutoffs) > 1:
            arc = sample_spiral(params, 1, max(cutoffs) - 1, chord, point_budget)
    counts = [
        spiral_cover_count(params, d, cutoff=c, method=method, arc=arc, anchor=anchor)
        for d, c in zip(deltas, cutoffs)
    ]
    return CoverLadder(tuple(deltas), tuple(counts), tuple(1.0 / deltas))


# --------------------------------------------------------------------------
# Assouad spectrum


@dataclass(frozen=True)
class LocalCount:
    numeric: int
    analytic: float
    indices: WindowIndices


def _window_box(radius):
    return (-radius, radius, -radius, radius)


def local_cover_analytic(params: SpiralParams, delta: float, theta: float,
                         idx: WindowIndices | None = None) -> float:
    """Three-part cover cost of ``S ∩ D(0, delta^theta)``.

    Dense core ``min(R, L_q^-p) min(R, L_q^-q) / delta^2``, turns wholly inside
    the window ``sum_{l_p}^{L_q} k^-p / delta`` and turns crossing it
    ``(min(l_p, L_q) - l_q) R / delta``, with ``R = delta^theta``.
    """
    idx = idx or window_indices(params, delta, theta)
    R = delta ** theta
    Lq = idx.L_q
    core = min(R, Lq ** -params.p) * min(R, Lq ** -params.q) / delta ** 2
    inner = 0.0
    if idx.l_p < Lq:
        inner = turn_length_sum(params, idx.l_p, Lq) / delta
    crossing = max(0, min(idx.l_p, Lq) - idx.l_q) * R / delta
    return core + inner + crossing


def local_cover_count(params: SpiralParams, delta: float, theta: float, *,
                      window="square", method="traversal", anchor=(0.0, 0.0)) -> LocalCount:
    """Grid count of the spiral inside the window of radius ``delta^theta`` at the
    origin, paired with the analytic three-part estimate.

    ``window="ball"`` restricts the count to cells whose sampled points lie in
    the disc; it always samples, so it is meant for moderate ``delta``.
    """
    idx = window_indices(params, delta, theta)
    R = delta ** theta
    if window == "square":
        numeric = spiral_cover_count(params, delta, window=_window_box(R), cutoff=idx.L_q,
                                     method=method, anchor=anchor)
    elif window == "ball":
        numeric = _ball_count(params, delta, R, idx.L_q, anchor)
    else:
        raise ValueError(f"unknown window shape {window!r}")
    return LocalCount(numeric, local_cover_analytic(params, delta, theta, idx), idx)


def _ball_count(params, delta, R, cutoff, anchor):
    core = _core_box(params, cutoff)
    # cells of the core rectangle whose centres lie in the disc
    cx = (np.arange(math.floor((core[0] - anchor[0]) / delta),
                    math.floor((core[1] - anchor[0]) / delta) + 1) + 0.5) * delta + anchor[0]
    cy = (np.arange(math.floor((core[2] - anchor[1]) / delta),
                    math.floor((core[3] - anchor[1]) / delta) + 1) + 0.5) * delta + anchor[1]
    cx, cy = cx[np.abs(cx) <= R + delta], cy[np.abs(cy) <= R + delta]
    n_core = int(np.count_nonzero(cx[:, None] ** 2 + cy[None, :] ** 2 <= R * R))
    if cutoff <= 1:
        return n_core
    arc = sample_spiral(params, 1, cutoff - 1, delta / 2)
    x, y = arc.x, arc.y
    inside = (x * x + y * y <= R * R) & ~((np.abs(x) <= core[1]) & (np.abs(y) <= core[3]))
    return n_core + int(np.unique(_cell_keys(x[inside], y[inside], delta, anchor)).size)


def estimate_assouad_spectrum(params: SpiralParams, theta: float, deltas, *,
                              window="square", method="traversal") -> CoverLadder:
    """Slope of ``log N_delta(S ∩ window)`` against ``log(delta^theta / delta)``."""
    deltas = np.sort(np.asarray(deltas, dtype=float))[::-1]
    if deltas.size < 4:
        raise DomainError("need a ladder of at least four scales")
    counts = [local_cover_count(params, d, theta, window=window, method=method).numeric
              for d in deltas]
    return CoverLadder(tuple(deltas), tuple(counts), tuple(deltas ** (theta - 1.0)))


def off_origin_count(params: SpiralParams, delta: float, theta: float, t_centre: float) -> int:
    """Grid count of the spiral in the square window of radius ``delta^theta``
    centred at the spiral point with parameter ``t_centre``."""
    R = delta ** theta
    x, y = curve(params, t_centre)
    box = (float(x) - R, float(x) + R, float(y) - R, float(y) + R)
    cutoff = separation_index(params.q, _OFFSET_Q, delta)
    return spiral_cover_count(params, delta, window=box, cutoff=cutoff)


# --------------------------------------------------------------------------
# intermediate dimensions


def cutoff_turn(params: SpiralParams, theta: float, delta: float, s: float, alpha: float = 1.0) -> int:
    """Smallest integer ``M`` with
    ``M >= exp(t (s - 1/alpha + theta (2 - s)) / (1 - p + alpha (p + q)))``, ``t = -log delta``."""
    t = -math.log(delta)
    p, q = params.p, params.q
    expo = t * (s - 1.0 / alpha + theta * (2.0 - s)) / (1.0 - p + alpha * (p + q))
    return max(1, math.ceil(math.exp(expo) * (1 - 1e-12)))


@dataclass(frozen=True)
class TwoScaleCover:
    """Cover of S_{p,q} by fine boxes on turns ``1..M`` and coarse boxes of side
    ``delta^theta`` tiling the rectangle holding the remaining turns."""

    theta: float
    delta: float
    s: float
    alpha: float
    M: int
    fine_boxes: int
    coarse_boxes: int

    def s_cost(self, s: float | None = None) -> float:
        """``sum |U_i|^s`` with fine boxes of size ``delta`` and coarse of size ``delta^theta``."""
        s = self.s if s is None else s
        return self.fine_boxes * self.delta ** s + self.coarse_boxes * self.delta ** (self.theta * s)


def two_scale_cover(params: SpiralParams, theta: float, delta: float, s: float,
                    alpha: float = 1.0) -> TwoScaleCover:
    if not 0 < theta <= 1:
        raise DomainError(f"need 0 < theta <= 1, got {theta}")
    if not 0 <= s <= 2:
        raise DomainError(f"need 0 <= s <= 2, got {s}")
    if not 0.5 < alpha <= 1:
        raise DomainError(f"need 1/2 < alpha <= 1 (alpha <= 1/2 gives the trivial bound 2), got {alpha}")
    if not 0 < delta < 1:
        raise DomainError(f"need 0 < delta < 1, got {delta}")
    M = cutoff_turn(params, theta, delta, s, alpha)
    fine = traversal_count(params, TWO_PI, TWO_PI * (M + 1), delta ** (1.0 / alpha))
    side = delta ** theta
    half_w, half_h = M ** (-params.p * alpha), M ** (-params.q * alpha)
    coarse = math.ceil(2 * half_w / side) * math.ceil(2 * half_h / side)
    return TwoScaleCover(theta, delta, s, alpha, M, int(fine), int(coarse))


def cost_decay_exponent(params: SpiralParams, theta: float, s: float, deltas, alpha: float = 1.0):
    """Fit ``s_cost ~ delta^e`` along ``deltas``; returns ``(e, r2)``.

    ``e > 0`` means the cost tends to zero, i.e. ``s`` is above the dimension.
    """
    deltas = np.asarray(deltas, dtype=float)
    costs = [two_scale_cover(params, theta, d, s, alpha).s_cost() for d in deltas]
    slope, _, r2 = loglog_fit(1.0 / deltas, costs)
    return -slope, r2


DEFAULT_INTERMEDIATE_LADDER = dyadic_ladder(8, 24)


def estimate_intermediate_dimension(params: SpiralParams, theta: float, deltas=None, *,
                                    alpha: float = 1.0, tol: float = 1e-3,
                                    min_r2: float = 0.99) -> formulas.DimensionValue:
    """Critical exponent where the two-scale cover cost stops decaying.

    Bisection on ``s`` in ``[0, 2]`` on the sign of the fitted decay exponent.
    The bracket ends must give clean power laws (``r2 >= min_r2``) of opposite
    sign, and the exponents met during bisection must be monotone in ``s``.
    """
    if not 0 < theta <= 1:
        raise DomainError(f"need 0 < theta <= 1, got {theta}")
    deltas = DEFAULT_INTERMEDIATE_LADDER if deltas is None else np.asarray(deltas, dtype=float)
    lo, hi = 0.0, 2.0
    e_lo, r2_lo = cost_decay_exponent(params, theta, lo, deltas, alpha)
    e_hi, r2_hi = cost_decay_exponent(params, theta, hi, deltas, alpha)
    if min(r2_lo, r2_hi) < min_r2:
        raise ConvergenceError(f"bracket fits not power laws (r2={r2_lo:.4f}, {r2_hi:.4f})")
    if e_hi <= 0:
        raise ConvergenceError(f"cost does not decay even at s={hi} (exponent {e_hi:.4f})")
    if e_lo > 0:
        return formulas.DimensionValue(lo, "estimate:lower-end")
    seen = [(lo, e_lo), (hi, e_hi)]
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        e_mid, _ = cost_decay_exponent(params, theta, mid, deltas, alpha)
        seen.append((mid, e_mid))
        if e_mid > 0:
            hi = mid
        else:
            lo = mid
    seen.sort()
    exps = [e for _, e in seen]
    if any(b < a - 1e-9 for a, b in zip(exps, exps[1:])):
        raise ConvergenceError("decay exponent is not monotone in s along this ladder")
    return formulas.DimensionValue(0.5 * (lo + hi), "estimate")


# --------------------------------------------------------------------------
# mass distribution


def mass_cutoff(params: SpiralParams, theta: float, delta: float, s: float) -> int:
    """Smallest integer ``M >= exp(t (s - 1 + theta (2 - s)) / (1 + q))``."""
    t = -math.log(delta)
    expo = t * (s - 1.0 + theta * (2.0 - s)) / (1.0 + params.q)
    return max(1, math.ceil(math.exp(expo) * (1 - 1e-12)))


@dataclass(frozen=True, eq=False)
class MassDistribution:
    """``mu = delta^(s-1) * sum_{k<=M} (length measure on turn k)``."""

    params: SpiralParams
    theta: float
    delta: float
    s: float
    M: int
    weights: np.ndarray

    @property
    def total(self) -> float:
        return float(self.weights.sum())

    def __post_init__(self):
        self._setup()

    def _setup(self):
        breaks = monotone_breaks(self.params, TWO_PI, TWO_PI * (self.M + 1))
        x, y = curve(self.params, breaks)
        t0, t1 = breaks[:-1], breaks[1:]
        object.__setattr__(self, "_t0", t0)
        object.__setattr__(self, "_t1", t1)
        object.__setattr__(self, "_bbox", (np.minimum(x[:-1], x[1:]), np.maximum(x[:-1], x[1:]),
                                           np.minimum(y[:-1], y[1:]), np.maximum(y[:-1], y[1:])))
        object.__setattr__(self, "_arclength", ArcLength(self.params, TWO_PI, TWO_PI * (self.M + 1)))

    def measure(self, boxes) -> np.ndarray:
        """Mass of each axis-aligned box ``(xlo, xhi, ylo, yhi)`` (array of shape (n, 4))."""
        boxes = np.atleast_2d(np.asarray(boxes, dtype=float))
        bx0, bx1, by0, by1 = self._bbox
        out = np.zeros(len(boxes))
        for start in range(0, len(boxes), 512):
            chunk = boxes[start:start + 512]
            hit = ((bx1[None, :] >= chunk[:, 0:1]) & (bx0[None, :] <= chunk[:, 1:2])
                   & (by1[None, :] >= chunk[:, 2:3]) & (by0[None, :] <= chunk[:, 3:4]))
            wi, pi = np.nonzero(hit)
            if not wi.size:
                continue
            box = tuple(chunk[wi, j] for j in range(4))
            ta, tb, ok = clip_pieces(self.params, self._t0[pi], self._t1[pi], box)
            lengths = np.where(ok, self._arclength.between(ta, np.maximum(ta, tb)), 0.0)
            out[start:start + len(chunk)] += np.bincount(wi, weights=lengths, minlength=len(chunk))
        return self.delta ** (self.s - 1.0) * out


def build_mass_distribution(params: SpiralParams, theta: float, delta: float) -> MassDistribution:
    if params.p >= 1:
        raise DomainError("the mass distribution lower bound is only needed for p < 1")
    if not 0 < theta <= 1:
        raise DomainError(f"need 0 < theta <= 1, got {theta}")
    s = formulas.intermediate_dimension(params, theta).value
    M = mass_cutoff(params, theta, delta, s)
    weights = delta ** (s - 1.0) * turn_length(params, np.arange(1, M + 1))
    return MassDistribution(params, theta, delta, s, M, weights)


@dataclass(frozen=True)
class MassReport:
    delta: float
    s: float
    M: int
    total_mass: float
    worst_ratio: float
    worst_window: tuple
    trials: int

    def to_dict(self) -> dict:
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in self.__dict__.items()}


def random_windows(params: SpiralParams, delta: float, theta: float, n: int, rng) -> np.ndarray:
    """Axis-aligned squares with diameter log-uniform in ``[delta, delta^theta]`` and
    centre uniform over the bounding box of the spiral."""
    diam = np.exp(rng.uniform(math.log(delta), theta * math.log(delta), n))
    half = diam / (2.0 * math.sqrt(2.0))
    a, b = params.radii(1)
    cx = rng.uniform(-a, a, n)
    cy = rng.uniform(-b, b, n)
    return np.column_stack([cx - half, cx + half, cy - half, cy + half]), diam


def mass_distribution_check(params: SpiralParams, theta: float, delta: float, trials: int,
                            seed: int = 0) -> MassReport:
    """Total mass and the worst ``mu(U) / |U|^s`` over ``trials`` random admissible windows."""
    if trials < 1:
        raise DomainError("need at least one trial")
    mu = build_mass_distribution(params, theta, delta)
    rng = np.random.default_rng(seed)
    boxes, diam = random_windows(params, delta, theta, trials, rng)
    ratios = mu.measure(boxes) / diam ** mu.s
    worst = int(np.argmax(ratios))
    return MassReport(delta, mu.s, mu.M, mu.total, float(ratios[worst]),
                      tuple(float(v) for v in boxes[worst]), trials)


@dataclass(frozen=True)
class MassLadderReport:
    reports: tuple
    mass_spread: float
    ratio_slope: float
    violation: str | None

    def to_dict(self) -> dict:
        return {"schema": 1, "reports": [r.to_dict() for r in self.reports],
                "mass_spread": self.mass_spread, "ratio_slope": self.ratio_slope,
                "violation": self.violation}


def mass_distribution_ladder(params: SpiralParams, theta: float, deltas, trials: int,
                             seed: int = 0, slope_tol: float = 0.1) -> MassLadderReport:
    """Run :func:`mass_distribution_check` along a ladder and look for growth.

    ``mass_spread`` is the largest relative deviation of the total mass from
    its ladder mean; ``ratio_slope`` the fitted slope of ``log worst_ratio``
    against ``log delta``.  A slope beyond ``slope_tol`` is reported together
    with the offending window.
    """
    reports = tuple(mass_distribution_check(params, theta, d, trials, seed) for d in deltas)
    empty = [float(r.delta) for r in reports if r.worst_ratio <= 0]
    if empty:
        raise ConvergenceError(f"no sampled window carried mass at delta={empty}; raise the trial count")
    masses = np.array([r.total_mass for r in reports])
    spread = float(np.max(np.abs(masses / masses.mean() - 1.0)))
    slope, _, _ = loglog_fit([r.delta for r in reports], [r.worst_ratio for r in reports])
    violation = None
    if abs(slope) > slope_tol:
        bad = max(reports, key=lambda r: r.worst_ratio)
        violation = f"worst ratio trend {slope:+.3f} per log(delta); window {bad.worst_window} at delta={bad.delta}"
    return MassLadderReport(reports, spread, slope, violation)


__all__ = [
    "CoverLadder", "WindowIndices", "LocalCount", "TwoScaleCover", "MassDistribution", "MassReport",
    "MassLadderReport", "loglog_fit", "geometric_ladder", "dyadic_ladder", "grid_box_count",
    "window_indices", "separation_index", "entry_index", "traversal_count", "spiral_cover_count",
    "estimate_box_dimension", "local_cover_count", "local_cover_analytic", "estimate_assouad_spectrum",
    "off_origin_count", "cutoff_turn", "two_scale_cover", "cost_decay_exponent",
    "estimate_intermediate_dimension", "mass_cutoff", "build_mass_distribution",
    "mass_distribution_check", "mass_distribution_ladder", "random_windows", "turn_of",
    "level_crossing",
]
