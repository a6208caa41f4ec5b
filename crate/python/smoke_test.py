"""Smoke test for the `wga` extension module.

Build and put the module on the path, then run:

    cargo build -p wga-python --release
    cp target/release/libwga.so python/wga.so
    python3 python/smoke_test.py
"""

import cmath
import math
import sys

from scipy.special import jv

import wga


def close(a, b, tol):
    assert abs(a - b) <= tol, f"{a} vs {b} (tol {tol})"


def main():
    for n in (-3, 0, 1, 7, 40):
        for x in (0.3, 4.0, 17.5, 60.0):
            close(wga.bessel_j(n, x), jv(n, x), 1e-13)

    # delta@0 under the analytic engine: e^{i n theta} J_n(2z)
    n_win, z, theta = 48, 1.3, math.pi / 2
    init = [0j] * (2 * n_win + 1)
    init[n_win] = 1 + 0j
    out, edge = wga.propagate(init, z, theta)
    assert not edge
    for n in range(-5, 6):
        close(out[n + n_win], cmath.exp(1j * n * theta) * jv(n, 2 * z), 1e-14)
    ode, _ = wga.propagate(init, z, theta, engine="ode", dz=1e-3)
    assert max(abs(a - b) for a, b in zip(out, ode)) < 1e-8
    close(sum(abs(a) ** 2 for a in out), 1.0, 1e-13)

    a = wga.CoherentLabel(1.0, 0.0)
    b = wga.CoherentLabel(1.0, math.pi)
    close(wga.overlap_closed(a, b), jv(0, 4.0), 1e-15)
    close(wga.overlap_sum(a, b), jv(0, 4.0), 1e-14)
    close(sum(abs(c) ** 2 for c in a.coeffs()), 1.0, 1e-14)

    k = wga.PolarKernel(0.5, 12)
    close(k.coefficient(3), 1.0 / jv(3, 1.0) ** 2, 1e-12 * k.coefficient(3))
    close(k.element(2, 2), 1.0, 1e-12)
    close(k.element(2, 2, nodes=64), 1.0, 1e-12)
    try:
        wga.PolarKernel(0.5, 400)
    except OverflowError:
        pass
    else:
        raise AssertionError("expected kernel overflow")

    lhs, rhs, diff = wga.convolution_check(0.5, 1.0, 0.4, -1.2)
    assert diff < 1e-8, (lhs, rhs)
    try:
        wga.convolution_check(0.0, 0.0, 0.4, -1.2)
    except OverflowError:
        pass
    else:
        raise AssertionError("expected divergence for the (0, 0) pair")

    close(wga.cartesian_element(2, 2, weights="unit"), 1.0, 1e-12)
    close(wga.naive_diag_quadrature(1, 0.5, 200.0), wga.naive_diag(1, 0.5), 1e-4)

    print("wga smoke test: ok")
    return 0


if __name__ == "__main__":
    sys.exit(main())
