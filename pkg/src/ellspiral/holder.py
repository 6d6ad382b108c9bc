"""
Upper bounds on the Hölder exponent of maps ``f : S_{p,q} -> S_{r,s}``.

Two routes are available: comparing box dimensions, and comparing the
2α-dimension profile of the source with the box dimension of the target.
Values above 1 carry no information and are clamped; the clamp is reported.

The Assouad-spectrum route is deliberately absent: for spiral-to-spiral maps
it only ever returns the trivial bound.
"""

from __future__ import annotations

import csv
import io
import itertools
from dataclasses import asdict, dataclass

from .errors import DomainError
from .geometry import SpiralParams


@dataclass(frozen=True)
class DeformationPair:
    source: SpiralParams
    target: SpiralParams

    @classmethod
    def of(cls, p, q, r, s):
        return cls(SpiralParams(p, q), SpiralParams(r, s))

    @property
    def pqrs(self):
        return self.source.p, self.source.q, self.target.p, self.target.q


@dataclass(frozen=True)
class Bound:
    raw: float
    value: float
    clamped: bool


def _bound(raw):
    return Bound(raw, min(raw, 1.0), raw > 1.0)


def box_dim_bound_raw(pair: DeformationPair) -> float:
    p, q, r, s = pair.pqrs
    if r > 1.0:
        raise DomainError(f"box-dimension bound needs r <= 1, got r={r}")
    if p <= 1.0:
        return (2.0 + q - p) * (1.0 + s) / ((2.0 + s - r) * (1.0 + q))
    return (1.0 + s) / (2.0 + s - r)


def box_dim_bound(pair: DeformationPair) -> Bound:
    return _bound(box_dim_bound_raw(pair))


def profile_bound_raw(pair: DeformationPair) -> float:
    p, q, r, s = pair.pqrs
    if p > 1.0 or r > 1.0:
        raise DomainError(f"profile bound needs p <= 1 and r <= 1, got p={p}, r={r}")
    return (p + q + r + s - p * r + q * s) / ((2.0 + s - r) * (p + q))


def profile_bound(pair: DeformationPair) -> Bound:
    return _bound(profile_bound_raw(pair))


def hyperbolic_bound(p: float, q: float) -> float:
    """Bound ``(p + q) / (2p)`` for maps between hyperbolic spirals ``S_p -> S_q``, p > q."""
    if not 0 < q < p:
        raise DomainError(f"need p > q > 0, got p={p}, q={q}")
    if p > 1.0:
        raise DomainError(f"need p <= 1, got p={p}")
    return (p + q) / (2.0 * p)


@dataclass(frozen=True)
class HolderBoundReport:
    p: float
    q: float
    r: float
    s: float
    box_bound: float | str
    profile_bound: float | str
    best: float
    binding: str

    def to_dict(self) -> dict:
        return {"schema": 1, **asdict(self)}


TRIVIAL = "none (trivial)"
NOT_APPLICABLE = "not applicable"
# bounds within rounding of 1 are exactly 1 in exact arithmetic (e.g. identity pairs)
NONTRIVIAL_MARGIN = 1e-12


def is_nontrivial(value: float) -> bool:
    return value < 1.0 - NONTRIVIAL_MARGIN


def best_bound(pair: DeformationPair) -> HolderBoundReport:
    """All applicable bounds, the smallest of them, and which one binds.

    A bound "applies" only when it constrains α below 1.
    """
    candidates = {}
    box = profile = NOT_APPLICABLE
    if pair.target.p <= 1.0:
        b = box_dim_bound(pair)
        box = b.value if is_nontrivial(b.value) else TRIVIAL
        if not isinstance(box, str):
            candidates["box"] = box
    if pair.source.p <= 1.0 and pair.target.p <= 1.0:
        b = profile_bound(pair)
        profile = b.value if is_nontrivial(b.value) else TRIVIAL
        if not isinstance(profile, str):
            candidates["profile"] = profile
    if candidates:
        binding = min(candidates, key=candidates.get)
        best = candidates[binding]
    else:
        binding, best = "no nontrivial bound", 1.0
    return HolderBoundReport(*pair.pqrs, box, profile, best, binding)


def sweep(p_values, q_values, r_values, s_values):
    """Rows ``(p, q, r, s, box_bound, profile_bound)`` (clamped) over a parameter grid,
    skipping configurations outside ``p <= q``, ``r <= s`` and ``r <= 1``."""
    rows = []
    for p, q, r, s in itertools.product(p_values, q_values, r_values, s_values):
        if p > q or r > s or r > 1.0:
            continue
        pair = DeformationPair.of(p, q, r, s)
        box = box_dim_bound(pair).value
        prof = profile_bound(pair).value if p <= 1.0 else float("nan")
        rows.append((p, q, r, s, box, prof))
    return rows


def sweep_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["p", "q", "r", "s", "box_bound", "profile_bound"])
    for row in rows:
        w.writerow([repr(float(v)) for v in row])
    return buf.getvalue()


def grid(start=0.05, stop=0.95, step=0.05):
    """Inclusive, rounded parameter grid (avoids float drift in the labels)."""
    n = int(round((stop - start) / step)) + 1
    return [round(start + i * step, 10) for i in range(n)]


__all__ = [
    "DeformationPair", "Bound", "HolderBoundReport", "box_dim_bound", "box_dim_bound_raw",
    "profile_bound", "profile_bound_raw", "hyperbolic_bound", "best_bound", "sweep", "sweep_csv",
    "grid", "is_nontrivial", "TRIVIAL", "NOT_APPLICABLE",
]
