"""A spin carried around a cone by its field.

The constellation of ``|J, m>`` is rigid: ``J + m`` stars ride on the field
direction and the rest sit opposite it.  Every pair stays either coincident
or antipodal, the correlation phase vanishes, and the total collapses to
``-m`` times the cone's solid angle.
"""

import math

from stellar_berry import berry

theta = 1.0
omega = 2 * math.pi * (1 - math.cos(theta))
n = 4

print(f"spin {n / 2}, field cone at theta = {theta:.4f}, solid angle {omega:.6f}")
print(f"{'m':>5} {'gamma':>12} {'-m Omega':>12} {'gamma_0':>12} {'gamma_C':>12}")
for up in range(n + 1):
    m = up - n / 2
    parts = berry.berry_phase(berry.spin_in_field_loop(n, m, theta, 2000))
    w = parts.wrapped()
    print(f"{m:5.1f} {w['gamma_total']:12.8f} {berry.wrap_angle(-m * omega):12.8f} "
          f"{w['gamma_0']:12.8f} {parts.gamma_C:12.8f}")
