#!/usr/bin/env python3
"""Literal-formula reference for the classical ac-Stark coefficient tables.

Evaluates
    Lam_i = -g_i / (omega_{i+1,i} - omega_d)
    X_i   = -g_i Lam_i
    S_i   = -(X_i - X_{i-1})
    Kq_i  = -4 S_i (Lam_i^2 + Lam_{i-1}^2)
            - (3 X_{i+1} Lam_i^2 - X_i Lam_{i+1}^2)
            + (3 X_{i-2} Lam_{i-1}^2 - X_{i-1} Lam_{i-2}^2)
with plain Python floats and explicit zero padding outside the level range.
Frozen into tests/test_dispersive.cpp.
"""

omega = [0.0, 5.0, 9.8]          # level frequencies
g = [0.3, 0.42]                  # i -> i+1 couplings
omega_d = 5.9                    # pump frequency
M = len(omega)


def pad(arr, i):
    return arr[i] if 0 <= i < len(arr) else 0.0


Lam = [-g[i] / ((omega[i + 1] - omega[i]) - omega_d) for i in range(M - 1)]
X = [-g[i] * Lam[i] for i in range(M - 1)]
S = [-(pad(X, i) - pad(X, i - 1)) for i in range(M)]
Kq = []
for i in range(M):
    kq = -4.0 * S[i] * (pad(Lam, i) ** 2 + pad(Lam, i - 1) ** 2)
    kq -= 3.0 * pad(X, i + 1) * pad(Lam, i) ** 2 - pad(X, i) * pad(Lam, i + 1) ** 2
    kq += 3.0 * pad(X, i - 2) * pad(Lam, i - 1) ** 2 - pad(X, i - 1) * pad(Lam, i - 2) ** 2
    Kq.append(kq)

for name, arr in (("Lam", Lam), ("X", X), ("S", S), ("Kq", Kq)):
    print(name, "=", [repr(v) for v in arr])
