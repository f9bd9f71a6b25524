"""Separated reference eigenvalues on the disk for constant n.

On a disk of radius R with constant refraction index, separation of
variables reduces the transmission eigenvalue condition per angular mode
m to a 2 x 2 characteristic determinant in Bessel functions:

    d_m(k) = J_m(k sqrt(n) R) J_m'(k R) - sqrt(n) J_m'(k sqrt(n) R) J_m(k R)

Real eigenvalues are the positive roots of d_m; they provide an element-
independent check for the disk runs.
"""

from __future__ import annotations

import numpy as np
from scipy.special import jv, jvp


def characteristic_det(m: int, k, n: float, radius: float = 0.5):
    """The mode-m characteristic determinant at wavenumber(s) k."""
    k = np.asarray(k, dtype=float)
    root_n = np.sqrt(n)
    return (jv(m, k * root_n * radius) * jvp(m, k * radius)
            - root_n * jvp(m, k * root_n * radius) * jv(m, k * radius))


def _bisect(f, a, b, tol):
    fa = f(a)
    for _ in range(200):
        c = 0.5 * (a + b)
        fc = f(c)
        if fa * fc <= 0:
            b = c
        else:
            a, fa = c, fc
        if b - a < tol:
            break
    return 0.5 * (a + b)


def disk_real_eigenvalues(n: float, radius: float = 0.5, k_max: float = 8.0,
                          max_mode: int = 12, tol: float = 1e-10,
                          scan_points: int = 4000):
    """Real transmission wavenumbers on the disk, sorted ascending.

    Roots are bracketed by a sign scan over (0, k_max] per angular mode
    and refined by bisection to `tol`.  Each root is returned once per
    mode; modes m >= 1 are doubly degenerate in the full problem.
    """
    if n <= 1.0:
        raise ValueError("constant n must exceed 1 for this reference")
    found = []
    ks = np.linspace(0.05, k_max, scan_points)
    for m in range(max_mode + 1):
        vals = characteristic_det(m, ks, n, radius)
        sign = np.sign(vals)
        for i in np.flatnonzero(np.diff(sign) != 0):
            root = _bisect(lambda k: characteristic_det(m, k, n, radius),
                           ks[i], ks[i + 1], tol)
            found.append((root, m))
    found.sort()
    return found


def smallest_disk_eigenvalue(n: float, radius: float = 0.5,
                             tol: float = 1e-10) -> float:
    """Smallest real transmission wavenumber on the disk."""
    roots = disk_real_eigenvalues(n, radius, tol=tol)
    if not roots:
        raise RuntimeError("no real eigenvalue located in the scan window")
    return roots[0][0]
