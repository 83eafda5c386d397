#!/usr/bin/env python3
"""Closed-form reference values for the Bogoliubov squeezing solver.

The modulus condition
    (Delta/2)^2 tanh^2(2r) + (kappa/4)^2 sinh^2(2r) = |Y|^2
is a quadratic in u = sinh^2(2r) once tanh^2 = u/(1+u) is substituted:
    (kappa/4)^2 u^2 + [(kappa/4)^2 + (Delta/2)^2 - Y^2] u - Y^2 = 0.
Solved here with mpmath at 50 digits; values are frozen into
tests/test_squeezing.cpp.
"""
import mpmath as mp

mp.mp.dps = 50


def r_closed(Delta, Y, kappa):
    a = (kappa / mp.mpf(4)) ** 2
    b = a + (Delta / mp.mpf(2)) ** 2 - Y * Y
    c = -Y * Y
    u = (-b + mp.sqrt(b * b - 4 * a * c)) / (2 * a)
    return mp.asinh(mp.sqrt(u)) / 2


def show(Delta, Y, kappa):
    r = r_closed(mp.mpf(Delta), mp.mpf(Y), mp.mpf(kappa))
    rmax = mp.asinh(4 * mp.mpf(Y) / mp.mpf(kappa)) / 2
    n_th = mp.sinh(r) ** 2
    delta_r = mp.mpf(Delta) / mp.cosh(2 * r)
    print(f"Delta={Delta} Y={Y} kappa={kappa}:")
    print(f"  r       = {mp.nstr(r, 17)}")
    print(f"  r_max   = {mp.nstr(rmax, 17)}")
    print(f"  n_th    = {mp.nstr(n_th, 17)}")
    print(f"  delta_r = {mp.nstr(delta_r, 17)}")


def main():
    show(0.3, 0.2, 1.0)
    show(-2.0, 0.7, 0.35)
    show(0.0, 0.2, 1.0)
    show(5.0, 0.05, 2.0)

    print("r_max at 4Y/kappa = 1:", mp.nstr(mp.asinh(mp.mpf(1)) / 2, 17))

    # Effective temperature: T = hbar w / (kB ln(1 + 1/n))
    hbar = mp.mpf("1.054571817e-34")
    kB = mp.mpf("1.380649e-23")
    for n, f_gz in ((mp.mpf("0.3"), mp.mpf("6.44e9")),
                    (mp.mpf("0.22"), mp.mpf("6.439e9"))):
        w = 2 * mp.pi * f_gz
        T = hbar * w / (kB * mp.log(1 + 1 / n))
        print(f"T_eff(n={n}, f={f_gz}) = {mp.nstr(T, 17)} K")

    # paper-anchor inversion: ratio -> n_th -> r
    ratio = mp.mpf("0.2308")
    n = ratio / (1 - ratio)
    print("ratio 0.2308 -> n_th =", mp.nstr(n, 17), " r =",
          mp.nstr(mp.asinh(mp.sqrt(n)), 17))
    print("asinh(sqrt(0.3)) =", mp.nstr(mp.asinh(mp.sqrt(mp.mpf("0.3"))), 17))


if __name__ == "__main__":
    main()
