"""The bilateral shift: window factors, the half-circle symbol, and circle maps."""

import numpy as np

from conjorbit import circle, shift

N = 64
for name, V in [("identity", shift.identity_factor(N)), ("Hankel flip", shift.hankel_flip(N))]:
    W = shift.shift_orbit_member(V).matrix
    M = shift.window_shift(N).matrix
    core = V.core + N
    print(f"{name:12s} factor: W = M on core {np.allclose(W[:, core], M[:, core])}, "
          f"W = M* on core {np.allclose(W[:, core], M.T[:, core])}")

n = np.arange(-4, 5)
print("\nhalf-circle coefficients", np.round(shift.halfcircle_coeffs(n), 6))
print("coefficient one against 2/pi:", shift.halfcircle_coeffs(1) - 2 / np.pi)

alpha = circle.omega_square()
rep = circle.mult_orbit_decision(circle.symbol_from_map(alpha), alpha, 2 ** 14)
print(f"\nsquare-flip symbol: member={rep.member}, (c) residual {rep.c_residual:.2e}, {rep.reason}")
psi = circle.increasing_psi_map(lambda t: t * t / (2 * np.pi))
rep = circle.mult_orbit_decision(circle.symbol_from_map(psi), psi, 2 ** 14)
print(f"increasing reparametrization: member={rep.member}, {rep.reason}")
