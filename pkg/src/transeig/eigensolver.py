"""Shift-invert Arnoldi for the non-symmetric block pencil.

The pencil (left, right) is real; eigenvalues nearest a complex shift
sigma are found by running Arnoldi on (left - sigma*right)^{-1} right in
complex arithmetic.  Converged Ritz directions are locked (deflated by
orthogonal projection) and the iteration restarts, either with a
combination of the wanted non-converged Ritz vectors or with a fresh
random vector once the current Krylov component is exhausted - the
latter is what reaches second copies of numerically degenerate
eigenvalues, and extra random probes at the end double-check that no
closer copy was missed.  Candidates from deflated sweeps are projected
eigenvectors; a Rayleigh-quotient polish restores the full ones and
resolves tight clusters.  Every reported pair passes a freshly computed
relative residual test.
"""

from __future__ import annotations

import cmath
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .assembly import BlockProblem

logger = logging.getLogger("transeig.eigensolver")

_BREAKDOWN = 1e-12
_REORTH_LOSS = 1e-8


def _log(event: str, **kv) -> None:
    logger.info("%s %s", event, " ".join(f"{k}={v}" for k, v in kv.items()))


class FactorizationError(Exception):
    """Direct factorization hit a (near-)singular pivot."""


class ShiftError(Exception):
    """The shifted pencil is singular; perturb sigma and retry."""


@dataclass(frozen=True)
class EigenPair:
    """One computed eigenvalue of the block pencil.

    value : lambda; wavenumber : principal square root of lambda with
    nonnegative real part; residual : ||left x - lambda right x|| /
    ||right x|| recomputed from the returned vector.
    """

    value: complex
    wavenumber: complex
    residual: float
    vector: Optional[np.ndarray] = None

    def blocks(self, n_dofs: int):
        """Split the eigenvector into its (u, auxiliary) halves."""
        if self.vector is None:
            return None, None
        return self.vector[:n_dofs], self.vector[n_dofs:]


@dataclass
class SolverConfig:
    sigma: complex
    nev: int = 6
    subspace: int = 0  # 0: use max(2*nev + 2, 24)
    tol: float = 1e-10
    max_restarts: int = 12
    seed: int = 20240901

    def __post_init__(self):
        if self.tol <= 0:
            raise ValueError("tolerance must be positive")
        if self.nev < 1:
            raise ValueError("nev must be >= 1")
        if self.subspace == 0:
            self.subspace = max(2 * self.nev + 2, 24)
        if self.subspace < 2 * self.nev + 2:
            raise ValueError("subspace dimension must be >= 2*nev + 2")


def principal_wavenumber(value: complex) -> complex:
    """sqrt(lambda) on the branch with Re >= 0 (Im >= 0 when Re == 0)."""
    k = cmath.sqrt(value)
    if k.real < 0 or (k.real == 0 and k.imag < 0):
        k = -k
    return k


class LinearSolve:
    """Handle around a sparse LU factorization with a backward-error guard."""

    def __init__(self, matrix: sp.spmatrix):
        mat = sp.csc_matrix(matrix, dtype=complex)
        if mat.shape[0] != mat.shape[1]:
            raise ValueError("matrix must be square")
        self._mat = mat
        try:
            self._lu = spla.splu(mat)
        except RuntimeError as exc:  # SuperLU signals exact singularity
            raise FactorizationError(f"singular to working precision: {exc}") from exc
        diag = np.abs(self._lu.U.diagonal())
        scale = diag.max() if len(diag) else 0.0
        if scale == 0.0 or diag.min() <= 1e-300:
            raise FactorizationError(
                f"singular pivot at index {int(np.argmin(diag))}")
        self._norm = spla.norm(mat, np.inf)

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """Solve to backward error <= 1e-12, with one refinement step."""
        z = self._lu.solve(rhs)
        res = rhs - self._mat @ z
        denom = self._norm * np.linalg.norm(z) + np.linalg.norm(rhs)
        if denom > 0 and np.linalg.norm(res) > 1e-12 * denom:
            z = z + self._lu.solve(res)
        return z


def factorize(matrix: sp.spmatrix) -> LinearSolve:
    """Factor a square sparse (complex) matrix for repeated solves."""
    return LinearSolve(matrix)


class _ReducedBlockSolve:
    """Shifted-pencil solve through the auxiliary-row elimination.

    For the assembled block layout (left = diag(S, M), right with M in the
    lower-left block and zero lower-right), solving (left - s*right) z = r
    reduces to one N x N factorization of S - s*B - s^2*C plus a mass
    solve, which is far sparser than factoring the 2N x 2N matrix.
    """

    def __init__(self, stiffness, coupling, wmass, mass_solve, sigma):
        self._reduced = factorize(stiffness - sigma * coupling
                                  - sigma * sigma * wmass)
        self._wmass = wmass
        self._mass_solve = mass_solve
        self._sigma = sigma
        self._n = stiffness.shape[0]

    def solve(self, rhs):
        f, g = rhs[: self._n], rhs[self._n:]
        gg = g if self._mass_solve is None else self._mass_solve(g)
        u = self._reduced.solve(f + self._sigma * (self._wmass @ gg))
        return np.concatenate([u, gg + self._sigma * u])


def _shifted_solver_factory(problem: BlockProblem):
    """Return sigma -> solve handle for (left - sigma*right).

    Uses the reduced N x N factorization when the pencil has the
    assembled two-field block structure; otherwise falls back to a
    direct factorization of the full shifted matrix.
    """
    left = sp.csr_matrix(problem.left, dtype=complex)
    right = sp.csr_matrix(problem.right, dtype=complex)
    n = problem.n_dofs
    structured = False
    if left.shape[0] == 2 * n:
        mass_l = left[n:, n:]
        structured = (left[:n, n:].nnz == 0 and left[n:, :n].nnz == 0
                      and right[n:, n:].nnz == 0
                      and (mass_l - right[n:, :n]).nnz == 0)
    if not structured:
        return lambda sigma: factorize(left - sigma * right)

    stiffness = left[:n, :n].tocsc()
    coupling = right[:n, :n].tocsc()
    wmass = right[:n, n:].tocsc()
    eye = sp.identity(n, dtype=complex, format="csr")
    if (mass_l - eye).nnz == 0:
        mass_solve = None
    else:
        mass_lu = factorize(mass_l)
        mass_solve = mass_lu.solve
    return lambda sigma: _ReducedBlockSolve(stiffness, coupling, wmass,
                                            mass_solve, sigma)


def certify(problem: BlockProblem, pair: EigenPair) -> float:
    """Recompute the relative residual with fresh matrix-vector products."""
    if pair.vector is None:
        raise ValueError("pair carries no eigenvector")
    x = pair.vector
    rx = problem.right @ x
    num = np.linalg.norm(problem.left @ x - pair.value * rx)
    den = np.linalg.norm(rx)
    return float(num / den) if den > 0 else float(num)


def _residual(left, right, lam, x) -> float:
    rx = right @ x
    num = np.linalg.norm(left @ x - lam * rx)
    den = np.linalg.norm(rx)
    return float(num / den) if den > 0 else float(num)


def _orthogonalize(w, basis_list):
    """One MGS pass against each basis (re-done once if orthogonality slips)."""
    coeffs = []
    before = np.linalg.norm(w)
    for basis in basis_list:
        c = basis.conj().T @ w
        w = w - basis @ c
        coeffs.append(c)
    for idx, basis in enumerate(basis_list):
        c2 = basis.conj().T @ w
        if np.linalg.norm(c2) > _REORTH_LOSS * max(before, 1e-300):
            w = w - basis @ c2
            coeffs[idx] = coeffs[idx] + c2
    return w, coeffs, before


def _arnoldi_sweep(op, v0, m, locked):
    """Build an Arnoldi factorization of the deflated operator.

    Returns (V, H, invariant) where V has j+1 columns, H is the (j+1) x j
    Hessenberg, and invariant marks a lucky breakdown (the Krylov space
    became invariant before reaching m vectors).
    """
    n = len(v0)
    V = np.zeros((n, m + 1), dtype=complex)
    H = np.zeros((m + 1, m), dtype=complex)
    V[:, 0] = v0
    for j in range(m):
        w = op(V[:, j])
        bases = ([locked] if locked is not None else []) + [V[:, : j + 1]]
        w, coeffs, before = _orthogonalize(w, bases)
        H[: j + 1, j] = coeffs[-1]
        hj = np.linalg.norm(w)
        if hj <= _BREAKDOWN * max(before, 1e-300):
            return V[:, : j + 1], H[: j + 1, : j + 1], True
        H[j + 1, j] = hj
        V[:, j + 1] = w / hj
    return V, H, False


def _rqi_polish(left, right, make_solver, lam, x, tol, steps=3):
    """Rayleigh-quotient iteration to purify a near-converged pair."""
    rho = _residual(left, right, lam, x)
    for _ in range(steps):
        if rho <= tol:
            break
        shift = lam * (1.0 + 1e-13) + 1e-13  # keep the solve nonsingular
        try:
            lu = make_solver(shift)
        except FactorizationError:
            break
        z = lu.solve(right @ x)
        nz = np.linalg.norm(z)
        if not np.isfinite(nz) or nz == 0.0:
            break
        x = z / nz
        bx = right @ x
        denom = np.vdot(x, bx)
        if denom == 0:
            break
        lam = np.vdot(x, left @ x) / denom
        rho = _residual(left, right, lam, x)
    return lam, x, rho


def shift_invert_arnoldi(problem: BlockProblem,
                         config: SolverConfig) -> List[EigenPair]:
    """Eigenvalues of the pencil nearest config.sigma.

    Restarted Arnoldi on the shift-inverted operator with locking of
    converged directions; restarts use the wanted non-converged Ritz
    directions, or a fresh random vector once the current Krylov
    component is exhausted (which is how second copies of degenerate
    eigenvalues are reached), and final random probes check that no
    closer copy was missed.  Every returned pair must pass the true
    pencil residual test at config.tol; a Rayleigh-quotient polish
    rescues deflation-projected candidates and tight-cluster members.
    Returns pairs sorted by |lambda - sigma|; on non-convergence the
    converged subset is returned and a diagnostic is logged.
    """
    left = sp.csr_matrix(problem.left, dtype=complex)
    right = sp.csr_matrix(problem.right, dtype=complex)
    n = left.shape[0]
    sigma = complex(config.sigma)
    make_solver = _shifted_solver_factory(problem)
    try:
        lu = make_solver(sigma)
    except FactorizationError as exc:
        raise ShiftError(
            f"pencil is singular at shift {sigma}; perturb sigma") from exc
    op = lambda x: lu.solve(right @ x)

    nev = min(config.nev, n)
    m = min(config.subspace, n)
    rng = np.random.default_rng(config.seed)
    locked = np.zeros((n, 0), dtype=complex)
    start = None
    lock_tol = max(10.0 * config.tol, 1e-9)
    prev_best = np.inf
    target = nev
    accepted: List[EigenPair] = []
    vectors: List[np.ndarray] = []
    sweep = 0

    def _try_accept(lam, x, allow_polish=True):
        """Certify (lam, x); polish tight-cluster or deflation-projected
        candidates with RQI.  Returns True when the pair is kept."""
        # Against already-accepted copies of (numerically) the same
        # eigenvalue, only the orthogonalized remainder is news: for a
        # degenerate eigenvalue it is the next copy, for a re-found
        # simple one it is noise and dies here or in certification.
        same = [v for p, v in zip(accepted, vectors)
                if abs(p.value - lam) <= 1e-7 * (1.0 + abs(lam))]
        if same:
            for v in same:
                x = x - v * np.vdot(v, x)
            nx = np.linalg.norm(x)
            if nx < 1e-3:
                logger.debug("duplicate lam=%s remainder=%.1e", lam, nx)
                return False
            x = x / nx
        # Candidates from deflated sweeps are projected eigenvectors whose
        # raw residual can be O(1); their Ritz value is still accurate, so
        # RQI restores the full eigenvector in a step or two.
        raw = _residual(left, right, lam, x)
        rho = raw
        if config.tol < rho <= 1e6 and allow_polish:
            lam, x, rho = _rqi_polish(left, right, make_solver, lam, x,
                                      config.tol)
        if rho > config.tol:
            logger.debug("reject lam=%s raw=%.2e rho=%.2e", lam, raw, rho)
            return False
        if any(abs(np.vdot(v, x)) > 0.999 for v in vectors):
            logger.debug("duplicate lam=%s rho=%.2e", lam, rho)
            return False  # duplicate (e.g. RQI fell onto an accepted pair)
        accepted.append(EigenPair(complex(lam), principal_wavenumber(lam),
                                  float(rho), x))
        vectors.append(x)
        return True

    while sweep <= config.max_restarts and len(accepted) < nev:
        v0 = start if start is not None else (
            rng.standard_normal(n) + 1j * rng.standard_normal(n))
        if locked.shape[1]:
            v0, _, _ = _orthogonalize(v0, [locked])
        nrm = np.linalg.norm(v0)
        if nrm < 1e-14:
            start = None
            sweep += 1
            continue
        v0 = v0 / nrm

        V, H, invariant = _arnoldi_sweep(op, v0, m,
                                         locked if locked.shape[1] else None)
        j = H.shape[1]
        theta, Y = np.linalg.eig(H[:j, :j])
        order = np.argsort(-np.abs(theta))
        sub_res = (np.zeros(j) if invariant or j == H.shape[0]
                   else np.abs(H[j, j - 1] * Y[-1, :]))

        newly = 0
        pending = []
        need = target - locked.shape[1]
        scale = max(abs(theta[order[0]]), 1e-300)
        best_pending = np.inf
        for idx in order[: need + 3 + locked.shape[1]]:
            th = theta[idx]
            if abs(th) < 1e-14 * scale:
                continue
            rel = sub_res[idx] / max(abs(th), 1e-300)
            stagnated = (rel <= 1e-4 and rel >= 0.5 * prev_best
                         and sweep > 0 and start is not None)
            if rel <= lock_tol or stagnated:
                x = V[:, :j] @ Y[:, idx]
                nx0 = np.linalg.norm(x)
                if nx0 < 1e-8:
                    continue
                x = x / nx0
                # Locked directions are deflated from later sweeps, so x
                # from those sweeps is the projected eigenvector; the RQI
                # polish inside _try_accept restores the full one.
                _try_accept(sigma + 1.0 / th, x)
                xo, _, _ = _orthogonalize(x.copy(), [locked]) if \
                    locked.shape[1] else (x, None, None)
                nx = np.linalg.norm(xo)
                if nx > 1e-8:
                    locked = np.column_stack([locked, xo / nx])
                newly += 1
                if len(accepted) >= nev or locked.shape[1] >= target:
                    break
            elif len(pending) < need:
                pending.append(idx)
                best_pending = min(best_pending, rel)
        _log("arnoldi_sweep", sigma=sigma, sweep=sweep,
             locked=locked.shape[1], accepted=len(accepted), new=newly,
             subspace=j, invariant=invariant)
        prev_best = best_pending
        start = V[:, :j] @ Y[:, pending].sum(axis=1) if pending else None
        if not pending and newly == 0 and locked.shape[1] >= target:
            target = locked.shape[1] + (nev - len(accepted))
        sweep += 1

    # Verification probes: a single Krylov run cannot see the second copy
    # of a degenerate eigenvalue, so the quota may have been filled with a
    # farther eigenvalue.  Fresh random starts deflated against everything
    # found will surface any closer missed copy; swap it in if so.
    probes = 0
    while len(accepted) >= nev and nev < n and probes < 3:
        accepted.sort(key=lambda p: abs(p.value - sigma))
        vectors = [p.vector for p in accepted]
        far = abs(accepted[nev - 1].value - sigma)
        v0 = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        if locked.shape[1]:
            v0, _, _ = _orthogonalize(v0, [locked])
        v0 = v0 / np.linalg.norm(v0)
        V, H, _ = _arnoldi_sweep(op, v0, m, locked if locked.shape[1] else None)
        j = H.shape[1]
        theta, Y = np.linalg.eig(H[:j, :j])
        improved = False
        for idx in np.argsort(-np.abs(theta))[:3]:
            th = theta[idx]
            if abs(th) < 1e-14:
                continue
            lam = sigma + 1.0 / th
            if abs(lam - sigma) >= far * (1.0 - 1e-9):
                break
            x = V[:, :j] @ Y[:, idx]
            x = x / np.linalg.norm(x)
            if _try_accept(lam, x):
                xo, _, _ = _orthogonalize(x.copy(), [locked])
                nx = np.linalg.norm(xo)
                if nx > 1e-8:
                    locked = np.column_stack([locked, xo / nx])
                improved = True
                _log("probe_found", sigma=sigma, value=lam)
        probes += 1
        if not improved:
            break
        accepted.sort(key=lambda p: abs(p.value - sigma))
        accepted = accepted[:nev]
        vectors = [p.vector for p in accepted]

    if len(accepted) < nev:
        _log("arnoldi_incomplete", sigma=sigma, wanted=nev, got=len(accepted),
             restarts=config.max_restarts)
    accepted.sort(key=lambda p: abs(p.value - sigma))
    return accepted[:nev]


def _dedup_key_order(pair: EigenPair):
    return (abs(pair.wavenumber), pair.wavenumber.imag)


def scan_shifts(problem: BlockProblem, shifts: Sequence[complex], nev: int,
                tol: float = 1e-10, subspace: int = 0,
                complete_conjugates: bool = True, seed: int = 20240901
                ) -> List[EigenPair]:
    """Union of shift-invert runs over several shifts, deduplicated.

    Results from different shifts that agree to |l1 - l2| <= 1e-7 (1+|l1|)
    are merged, keeping the multiplicity observed within a single run (so
    numerically degenerate pairs survive) and the smallest-residual
    representatives.  For the real pencil, eigenvalues found at a complex
    shift are completed with their conjugates.  Sorted by |k|, then Im k.
    """
    if not shifts:
        raise ValueError("shift list must be non-empty")
    runs = []
    for s in shifts:
        cfg = SolverConfig(sigma=complex(s), nev=nev, tol=tol,
                           subspace=subspace, seed=seed)
        try:
            found = shift_invert_arnoldi(problem, cfg)
        except ShiftError as exc:
            _log("shift_failed", sigma=s, error=str(exc))
            continue
        if complete_conjugates:
            extra = []
            for p in found:
                if abs(p.value.imag) > 1e-9 * (1.0 + abs(p.value)):
                    conj = EigenPair(p.value.conjugate(),
                                     principal_wavenumber(p.value.conjugate()),
                                     p.residual,
                                     None if p.vector is None else p.vector.conj())
                    extra.append(conj)
            found = found + extra
        runs.append(found)

    groups: List[List[List[EigenPair]]] = []  # group -> per-run member lists

    def _match(group, pair):
        rep = group[0][0]
        return abs(pair.value - rep.value) <= 1e-7 * (1.0 + abs(pair.value))

    for run in runs:
        placed: dict = {}
        for pair in run:
            for gi, group in enumerate(groups):
                if _match(group, pair):
                    if gi in placed:
                        placed[gi].append(pair)
                    else:
                        placed[gi] = [pair]
                        group.append(placed[gi])
                    break
            else:
                bucket = [pair]
                groups.append([bucket])
                placed[len(groups) - 1] = bucket
    out: List[EigenPair] = []
    for group in groups:
        # keep the run that resolved the most copies of this eigenvalue
        best = max(group, key=lambda bucket: (len(bucket),
                                              -min(p.residual for p in bucket)))
        out.extend(sorted(best, key=lambda p: p.residual))
    out.sort(key=_dedup_key_order)
    return out
