#!/usr/bin/env python3
"""Hand-derived steady state of the driven damped linear cavity.

For H = Delta a^dag a + eps (a + a^dag) with loss kappa D[a], the steady
coherent amplitude is  <a> = -i eps / (kappa/2 + i Delta).  Also prints the
two-level dispersive pointer fields  alpha_i = -eps / (Delta + S_i - i kappa/2)
for the Stark-shifted detunings.  Frozen into tests/test_lindblad.cpp and
tests/test_semiclassical.cpp.
"""

kappa = 1.0
Delta = 0.3
eps = 0.5
a = -1j * eps / (kappa / 2.0 + 1j * Delta)
print(f"<a>(Delta=0.3, eps=0.5, kappa=1) = {a.real!r} {a.imag:+.17g} i")
print(f"n = {abs(a)**2!r}")

# two-level dispersive pointer fields: drive at omega_d, qubit at omega10,
# coupling g.  Lam = -g/(omega10-omega_d); X = -g Lam; S0 = -X, S1 = +X.
omega_r, omega_d, omega10, g, kappa2, eps2 = 100.0, 99.5, 125.5, 0.65, 1.0, 1.33
Lam = -g / (omega10 - omega_d)
X = -g * Lam
for i, S in enumerate((-X, X)):
    D = (omega_r - omega_d) + S
    alpha = -eps2 / (D - 1j * kappa2 / 2.0)
    print(f"alpha_{i} = {alpha.real!r} {alpha.imag:+.17g} i   (S={S!r})")
