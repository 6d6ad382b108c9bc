"""
Counting covers numerically
===========================

Estimate the box dimension, a point of the Assouad spectrum and the
intermediate dimension at theta = 1/2 by explicit grid covers, then check
the mass distribution built for the lower bound.
"""

from ellspiral import SpiralParams
from ellspiral.covering import (
    dyadic_ladder,
    estimate_assouad_spectrum,
    estimate_box_dimension,
    estimate_intermediate_dimension,
    local_cover_count,
    mass_distribution_ladder,
)
from ellspiral.formulas import assouad_spectrum, box_dimension, intermediate_dimension

P = SpiralParams(0.4, 0.7)

# global counts over nine dyadic scales; the core of small turns is covered as a block
box = estimate_box_dimension(P, 2.0 ** -15, 2.0 ** -7, 9)
print(f"box slope {box.slope:.4f} (r2 {box.r2:.5f}); closed form {box_dimension(P).value:.4f}")
print(box.to_csv())

# counts inside the window of radius delta^theta at the origin
theta = 0.3
one = local_cover_count(P, 2.0 ** -16, theta)
print(f"numeric {one.numeric} vs three-part estimate {one.analytic:.0f}")
spec = estimate_assouad_spectrum(P, theta, dyadic_ladder(12, 20))
print(f"spectrum slope {spec.slope:.4f}; closed form {assouad_spectrum(P, theta).value:.4f}")

# critical exponent of the two-scale cover cost
est = estimate_intermediate_dimension(P, 0.5)
print(f"intermediate estimate {est.value:.4f}; closed form {intermediate_dimension(P, 0.5).value:.4f}")

# the measure behind the lower bound keeps its mass and never over-charges a window;
# the worst ratio is a maximum over random windows, so its trend is noisy below 10^4 trials
rep = mass_distribution_ladder(P, 0.5, [2.0 ** -12, 2.0 ** -16, 2.0 ** -20], trials=10_000)
print(f"mass spread {rep.mass_spread:.3f}, worst-ratio slope {rep.ratio_slope:+.4f}")
