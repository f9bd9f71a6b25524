"""Independent brute-force eigenvalue oracle for small block pencils.

Deflated shift-invert power iteration on the explicitly inverted dense
pencil: the dense matrix C = (left - sigma*right)^{-1} right is iterated
to the dominant eigenpair, the matching left eigenvector is obtained by
iterating C^H, and the pair is removed by Hotelling deflation.  A short
two-vector extraction handles conjugate pairs and exact ties, where a
single power iterate cannot settle.  This deliberately shares no code
with the package's Arnoldi path.
"""

import numpy as np


class OracleError(Exception):
    pass


def _eig2(t11, t12, t21, t22):
    """Closed-form eigenpairs of a 2x2 matrix."""
    mean = 0.5 * (t11 + t22)
    disc = np.sqrt(mean * mean - (t11 * t22 - t12 * t21) + 0j)
    out = []
    for lam in (mean + disc, mean - disc):
        if abs(t12) > abs(lam - t11):
            v = np.array([t12, lam - t11])
        else:
            v = np.array([lam - t22, t21])
        nv = np.linalg.norm(v)
        v = np.array([1.0, 0.0]) if nv == 0 else v / nv
        out.append((lam, v))
    return out


def _power_dominant(C, tol, max_iter, rng):
    """Dominant eigenpair(s) of C by power iteration.

    Returns a list of (theta, vector): one entry normally, two when the
    iterate keeps rotating inside a dominant 2-plane (conjugate pair or
    tie) and the plane extraction certifies both members.
    """
    n = C.shape[0]
    z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    z /= np.linalg.norm(z)
    check_every = 8
    for it in range(max_iter):
        w = C @ z
        nw = np.linalg.norm(w)
        if nw == 0:
            raise OracleError("iterate vanished; operator is nilpotent here")
        if it % check_every == 0 or it == max_iter - 1:
            theta = np.vdot(z, w)
            if np.linalg.norm(w - theta * z) <= tol * abs(theta):
                return [(theta, z)]
        z = w / nw
    # Rotation inside a dominant 2-plane: extract both members from the
    # span of two consecutive iterates.
    w = C @ z
    q1 = z
    q2 = w - q1 * np.vdot(q1, w)
    nq2 = np.linalg.norm(q2)
    if nq2 < 1e-14:
        theta = np.vdot(q1, w)
        return [(theta, q1)]
    q2 /= nq2
    c1, c2 = C @ q1, C @ q2
    pairs = _eig2(np.vdot(q1, c1), np.vdot(q1, c2), np.vdot(q2, c1),
                  np.vdot(q2, c2))
    out = []
    for lam, v in pairs:
        x = v[0] * q1 + v[1] * q2
        x /= np.linalg.norm(x)
        if np.linalg.norm(C @ x - lam * x) <= 10 * tol * abs(lam):
            out.append((lam, x))
    if not out:
        raise OracleError("power iteration failed to converge")
    return out


def dense_shift_invert_eigs(left, right, sigma, nev, tol=1e-12,
                            max_iter=300000, seed=7):
    """The nev eigenvalues of the pencil nearest sigma, by brute force."""
    A = np.asarray(left.todense() if hasattr(left, "todense") else left,
                   dtype=complex)
    B = np.asarray(right.todense() if hasattr(right, "todense") else right,
                   dtype=complex)
    C = np.linalg.solve(A - sigma * B, B)
    CH = C.conj().T
    rng = np.random.default_rng(seed)
    values = []
    while len(values) < nev:
        rights_ = _power_dominant(C, tol, max_iter, rng)
        for theta, x in rights_:
            if len(values) >= nev:
                break
            # matching left eigenvector: dominant of the deflated adjoint
            for attempt in range(5):
                candidates = _power_dominant(CH, tol, max_iter, rng)
                y = None
                for theta_l, yc in candidates:
                    if abs(np.conj(theta_l) - theta) <= 1e-6 * (1 + abs(theta)):
                        y = yc
                        break
                if y is not None and abs(np.vdot(y, x)) > 1e-8:
                    break
                y = None
            if y is None:
                raise OracleError("no matching left eigenvector")
            s = np.vdot(y, x)
            C = C - np.outer(theta * x, y.conj()) / s
            CH = CH - np.outer(np.conj(theta) * y, x.conj()) / np.conj(s)
            values.append(sigma + 1.0 / theta)
    return values
