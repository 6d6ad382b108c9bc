"""
Closed-form dimensions
======================

Tabulate the intermediate dimensions and the Assouad spectrum of
S_{0.4,0.7}, and locate the two kinks of the spectrum.
"""

import numpy as np

from ellspiral import SpiralParams
from ellspiral.formulas import (
    assouad_spectrum,
    box_dimension,
    hausdorff_dimension,
    intermediate_dimension,
    phase_transitions,
    record,
)

P = SpiralParams(0.4, 0.7)

print("Hausdorff", hausdorff_dimension(P).value, " box", box_dimension(P).value)

# dim_theta climbs from 1 at theta=0 to the box dimension at theta=1
for theta in np.linspace(0, 1, 6):
    print(f"theta {theta:.1f}: dim_theta {intermediate_dimension(P, theta).value:.6f}")

# the spectrum has three pieces and reaches 2 at q/(1+q)
a, b = phase_transitions(P)
print(f"breakpoints {a:.6f} and {b:.6f}")
for theta in (0.1, a, 0.3, b, 0.9):
    dv = assouad_spectrum(P, theta)
    print(f"theta {theta:.4f}: {dv.value:.6f} ({dv.branch})")

# records are plain dicts ready for JSON
print(record("intermediate", P, theta=0.5))
