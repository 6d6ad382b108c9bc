"""
Turns, gaps and lengths of an elliptical spiral
===============================================

Walk through the geometry of S_{0.4,0.7}: where the turns sit, how long
they are, how close neighbouring turns come, and what a sampled polyline
looks like on disk.
"""

import numpy as np

from ellspiral import SpiralParams, point_at, sample_spiral
from ellspiral.geometry import turn_gap_per_turn, turn_length, turn_length_bounds

P = SpiralParams(0.4, 0.7)

# a point on the curve is (t^-p cos t, t^-q sin t)
print("point at t=10:", point_at(P, 10.0))

# turn k runs over [2 pi k, 2 pi (k+1)); its length sits between two closed-form bounds
for k in (1, 10, 100):
    lo, hi = turn_length_bounds(P, k)
    print(f"turn {k:>3}: length {turn_length(P, k)[0]:.6f} in [{lo:.6f}, {hi:.6f}]")

# the vertical gap between turns shrinks like q / k^(1+q)
for k in (2, 20, 200):
    print(f"gap scale at turn {k:>3}: {turn_gap_per_turn(P, k):.3e}")

# a polyline with chord at most 1e-3 over turns 1..50
arc = sample_spiral(P, 1, 50, 1e-3)
print(f"{len(arc)} points, longest chord {arc.chords().max():.2e}, length {arc.length():.4f}")
assert np.all(arc.chords() <= 1e-3)

# the CSV format round-trips exactly
text = arc.to_csv()
print(text.splitlines()[0], "...", len(text.splitlines()) - 1, "rows")
