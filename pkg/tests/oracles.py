"""Independent reference values used across the test modules."""

import numpy as np


def square_well_pole(lam, guess, a=1.0):
    """Pole of the s-wave square-well S-matrix from kappa cot(kappa a) = i k (mpmath)."""
    import mpmath as mp

    def f(k):
        kap = mp.sqrt(k * k + 2 * lam)
        return kap * mp.cos(kap * a) - 1j * k * mp.sin(kap * a)

    return complex(mp.findroot(f, mp.mpc(guess)))


def square_well_bound_state(lam, lo, hi, a=1.0):
    """gamma with -gamma = kappa cot(kappa a), kappa = sqrt(2 lam - gamma^2), by bisection."""
    def g(gam):
        kap = np.sqrt(2 * lam - gam * gam)
        return kap * np.cos(kap * a) + gam * np.sin(kap * a)

    glo, ghi = g(lo), g(hi)
    assert glo * ghi < 0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if gm * glo <= 0:
            hi = mid
        else:
            lo, glo = mid, gm
    return 0.5 * (lo + hi)


def square_well_s(k, lam, a=1.0):
    """Analytic s-wave S-matrix of the square well."""
    kap = np.sqrt(k * k + 2 * lam + 0j)
    c = kap / np.tan(kap * a)
    return np.exp(-2j * k * a) * (c + 1j * k) / (c - 1j * k)
