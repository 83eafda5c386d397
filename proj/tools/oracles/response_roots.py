#!/usr/bin/env python3
"""Reference values for the classical driven-resonator response.

Solves the steady-state photon-number polynomial with numpy's companion-matrix
root finder, entirely independent of the C++ Newton/bisection machinery. The
printed numbers are frozen into tests/test_semiclassical.cpp.
"""
import numpy as np

np.set_printoptions(precision=17)


def response_roots(delta0, K, Kp, kappa, eps2):
    # n * [(delta0 + K n + Kp n^2)^2 + kappa^2/4] = eps^2
    # Expand in powers of n with numpy polynomials (highest degree first).
    D = np.polynomial.Polynomial([delta0, K, Kp])
    P = np.polynomial.Polynomial([0.0, 1.0]) * (D * D + kappa**2 / 4.0)
    P = P - eps2
    roots = P.roots()
    out = []
    for z in roots:
        if abs(z.imag) < 1e-9 * max(1.0, abs(z.real)) and z.real > 0:
            out.append(z.real)
    return sorted(out)


def alpha_for(n, delta0, K, Kp, kappa, eps):
    C = delta0 + K * n + Kp * n * n - 1j * kappa / 2.0
    return -eps / C


def main():
    print("== cubic response, kappa=1, K=-1/8, K'=0, delta0=1, eps^2=1.9 ==")
    ns = response_roots(1.0, -0.125, 0.0, 1.0, 1.9)
    eps = np.sqrt(1.9)
    for n in ns:
        a = alpha_for(n, 1.0, -0.125, 0.0, 1.0, eps)
        print(f"n = {n!r}  alpha = {a.real!r} {a.imag:+.17g} i")

    print("== single-root case, same params, eps^2=1.0 ==")
    for n in response_roots(1.0, -0.125, 0.0, 1.0, 1.0):
        print(f"n = {n!r}")

    print("== single-root case, eps^2=2.5 (above the fold window) ==")
    for n in response_roots(1.0, -0.125, 0.0, 1.0, 2.5):
        print(f"n = {n!r}")

    print("== quintic response with K' != 0 ==")
    # kappa=1, K=-0.1, K'=0.004, delta0=1, eps^2=1.5
    for n in response_roots(1.0, -0.1, 0.004, 1.0, 1.5):
        print(f"n = {n!r}")

    print("== fold window at Omega=2 in reduced units ==")
    # x = n/n0, n0 = kappa/(2|K|); E~^2 = x[(x-Omega)^2+1]; folds at
    # x+- = (2 Omega +- sqrt(Omega^2-3))/3.
    Omega = 2.0
    s = np.sqrt(Omega * Omega - 3.0)
    xm, xp = (2 * Omega - s) / 3.0, (2 * Omega + s) / 3.0
    E2 = lambda x: x * ((x - Omega) ** 2 + 1.0)
    print(f"x- = {xm!r} x+ = {xp!r}")
    print(f"E2(x-) = {E2(xm)!r}  E2(x+) = {E2(xp)!r}")
    print(f"window = ({min(E2(xm), E2(xp))!r}, {max(E2(xm), E2(xp))!r})")

    print("== cusp constants ==")
    print(f"sqrt3   = {np.sqrt(3.0)!r}")
    print(f"x_c     = {2.0 / np.sqrt(3.0)!r}")
    print(f"E_c     = {8.0 / (3.0 * np.sqrt(3.0))!r}")
    # n_c for kappa=1, K=-1/8: n0 = 4
    print(f"n_c(kappa=1,K=-1/8) = {4.0 * 2.0 / np.sqrt(3.0)!r}")


if __name__ == "__main__":
    main()
