"""Experiment orchestration: single solves, convergence studies, and
regression comparisons against published reference eigenvalues.

A case is (domain, element, refraction model, mesh levels).  Levels are
subdivisions per unit side for the flat domains and refinement levels
for the disk.  Solves cover the low spectrum by scanning a few shifts
seeded from a coarse companion mesh, and eigenvalues are reported sorted
by |k| with multiplicities observed as clusters.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .assembly import AssembledSystem, BlockProblem, assemble, build_block_problem
from .elements import ADINI, MZ, adini_basis, build_dof_map, mz_basis
from .eigensolver import EigenPair, scan_shifts
from .mesh import Mesh, build_disk_tri_mesh, build_square_rect_mesh, build_structured_tri_mesh
from .refraction import RefractionModel, make_model

logger = logging.getLogger("transeig.experiments")

CSV_HEADER = "domain,element,n_kind,mu,level,h,index,k_re,k_im,residual"

CLUSTER_RTOL = 1e-6  # observed-multiplicity clustering of |k|
_SEED_LEVEL_FLAT = 4
_SEED_LEVEL_DISK = 1


@dataclass
class ExperimentConfig:
    domain: str                      # square | lshape | triangle | disk
    element: str                     # adini | mz
    n_kind: str = "constant"         # constant | affine
    n_params: tuple = (16.0,)
    mu: Optional[float] = None
    levels: Tuple[int, ...] = (8, 16, 32)
    shifts: Tuple[complex, ...] = ()
    nev: int = 8
    # residual scale grows like the stiffness norm (~h^-2); 1e-8 holds
    # across the desk-scale meshes and is the suite-wide residual gate
    tol: float = 1e-8
    track: Tuple[int, ...] = (1,)
    use_identity_mass: bool = False
    output: Optional[str] = None

    def __post_init__(self):
        if self.element == ADINI and self.domain != "square":
            raise ValueError("the adini element runs on square rectangle "
                             "meshes only")
        if list(self.levels) != sorted(set(self.levels)):
            raise ValueError("levels must be strictly increasing")

    def model(self) -> RefractionModel:
        bbox = _domain_bbox(self.domain)
        return make_model(self.n_kind, self.n_params, self.mu, bbox)


def _domain_bbox(domain: str):
    return {
        "square": ((0.0, 1.0), (0.0, 1.0)),
        "lshape": ((-1.0, 1.0), (-1.0, 1.0)),
        "triangle": ((-np.sqrt(3) / 2, np.sqrt(3) / 2), (-0.5, 1.0)),
        "disk": ((-0.5, 0.5), (-0.5, 0.5)),
    }[domain]


def build_mesh(domain: str, element: str, level: int) -> Mesh:
    if element == ADINI:
        return build_square_rect_mesh(level)
    if domain == "disk":
        return build_disk_tri_mesh(level)
    return build_structured_tri_mesh(domain, level)


def build_problem(config: ExperimentConfig, level: int,
                  model: Optional[RefractionModel] = None
                  ) -> Tuple[Mesh, AssembledSystem, BlockProblem]:
    mesh = build_mesh(config.domain, config.element, level)
    basis = adini_basis() if config.element == ADINI else mz_basis()
    dofmap = build_dof_map(mesh, config.element)
    system = assemble(mesh, dofmap, basis, model or config.model(),
                      use_identity_mass=config.use_identity_mass)
    return mesh, system, build_block_problem(system)


def cluster_indices(pairs: Sequence[EigenPair]):
    """Assign 1-based |k| ordinals; equal-|k| clusters share a label.

    Returns a list of (index, pair) with indices counting every member,
    and a parallel list of cluster labels like "2,3" for reporting.
    """
    out = []
    labels = []
    i = 0
    pairs = sorted(pairs, key=lambda p: (abs(p.wavenumber), p.wavenumber.imag))
    while i < len(pairs):
        j = i + 1
        while (j < len(pairs)
               and abs(abs(pairs[j].wavenumber) - abs(pairs[i].wavenumber))
               <= CLUSTER_RTOL * (1.0 + abs(pairs[i].wavenumber))):
            j += 1
        label = ",".join(str(t + 1) for t in range(i, j))
        for t in range(i, j):
            out.append((t + 1, pairs[t]))
            labels.append(label)
        i = j
    return out, labels


def default_shifts(config: ExperimentConfig, nev_scan: int) -> Tuple[complex, ...]:
    """Seed shifts from the low spectrum of a coarse companion mesh.

    The coarse problem is solved near zero (the left block matrix is
    definite, so the unshifted factorization exists); the seed
    eigenvalues are thinned to ~5% relative gaps and each surviving
    value, slightly perturbed off itself, becomes a shift.
    """
    seed_level = _SEED_LEVEL_DISK if config.domain == "disk" else _SEED_LEVEL_FLAT
    seed_cfg = replace(config, levels=(seed_level,), shifts=())
    model = seed_cfg.model()
    _, _, problem = build_problem(seed_cfg, seed_level, model)
    want = min(max(2 * nev_scan, 12), 2 * problem.n_dofs - 2)
    pairs = scan_shifts(problem, [1e-3], want, tol=1e-8,
                        subspace=max(2 * want + 2, 24))
    shifts: List[complex] = []
    for p in sorted(pairs, key=lambda q: abs(q.value)):
        lam = p.value
        if lam.imag < -1e-9:
            continue  # conjugate partner covers it
        if any(abs(lam - s) <= 0.12 * (1.0 + abs(s)) for s in shifts):
            continue
        if abs(lam.imag) <= 1e-9 * (1 + abs(lam)):
            shifts.append(complex(lam.real * 1.003 + 1e-4, 0.0))
        else:
            shifts.append(lam * (1 + 3e-3))
        if len(shifts) >= 8:
            break
    if not shifts:
        shifts = [complex(3.5)]
    logger.info("default_shifts domain=%s element=%s shifts=%s",
                config.domain, config.element, shifts)
    return tuple(shifts)


@dataclass(frozen=True)
class CaseRow:
    domain: str
    element: str
    n_kind: str
    mu: float
    level: int
    h: float
    index: int
    k: complex
    residual: float


def run_case(config: ExperimentConfig) -> List[CaseRow]:
    """Solve every level and report the tracked eigenvalue indices."""
    model = config.model()
    nev_scan = max(config.nev, max(config.track) + 2)
    shifts = config.shifts or default_shifts(config, nev_scan)
    rows: List[CaseRow] = []
    for level in config.levels:
        mesh, _, problem = build_problem(config, level, model)
        pairs = scan_shifts(problem, shifts, nev_scan, tol=config.tol)
        indexed, _ = cluster_indices(pairs)
        for idx, pair in indexed:
            if config.track and idx not in config.track:
                continue
            rows.append(CaseRow(config.domain, config.element, config.n_kind,
                                model.mu, level, mesh.h_max, idx,
                                pair.wavenumber, pair.residual))
    return rows


@dataclass(frozen=True)
class ConvergenceReport:
    """Error history of one tracked eigenvalue across mesh levels."""

    index: int
    levels: Tuple[int, ...]
    h: Tuple[float, ...]
    k_values: Tuple[complex, ...]
    reference: complex
    reference_kind: str              # "richardson" | "richardson-singular"
    errors: Tuple[float, ...]
    slope: Optional[float]


def richardson_reference(k_mid: complex, k_fine: complex,
                         h_mid: float, h_fine: float) -> complex:
    """Order-2 extrapolated limit from the two finest levels."""
    r2 = (h_mid / h_fine) ** 2
    return (r2 * k_fine - k_mid) / (r2 - 1.0)


def fit_slope(h: Sequence[float], err: Sequence[float]) -> float:
    """Least-squares slope of log(err) against log(h)."""
    h = np.asarray(h, dtype=float)
    err = np.asarray(err, dtype=float)
    keep = err > 0
    if keep.sum() < 2:
        raise ValueError("need at least two positive errors to fit a slope")
    return float(np.polyfit(np.log(h[keep]), np.log(err[keep]), 1)[0])


def convergence_study(config: ExperimentConfig) -> List[ConvergenceReport]:
    """Track eigenvalues across refinements and fit convergence slopes.

    The tracked family is selected by |k| ordinal on the coarsest level
    and followed by nearest-value continuation on finer ones.  The
    reference value is the order-2 extrapolation of the two finest
    levels; the slope is fitted over all levels except the finest, whose
    error against that reference is fixed by construction.  On the
    L-shape the corner singularity invalidates the order-2 assumption,
    so the reference is biased and the report is flagged; using the
    finest value itself instead would zero out its own error and push
    the fitted slope up to 2 regardless of the data.
    """
    if len(config.levels) < 3:
        raise ValueError("a convergence study needs at least 3 levels")
    model = config.model()
    nev_scan = max(config.nev, max(config.track) + 2)
    shifts = config.shifts or default_shifts(config, nev_scan)
    per_level: List[Tuple[int, float, List[EigenPair]]] = []
    for level in config.levels:
        mesh, _, problem = build_problem(config, level, model)
        pairs = scan_shifts(problem, shifts, nev_scan, tol=config.tol)
        if not pairs:
            logger.warning("study level=%s produced no converged eigenvalues; "
                           "level skipped", level)
            continue
        per_level.append((level, mesh.h_max, pairs))

    reports = []
    coarse_indexed, _ = cluster_indices(per_level[0][2])
    for index in config.track:
        match = [p for i, p in coarse_indexed if i == index]
        if not match:
            logger.warning("study index=%d not present on coarsest level", index)
            continue
        ks = [match[0].wavenumber]
        hs = [per_level[0][1]]
        levels = [per_level[0][0]]
        for level, h, pairs in per_level[1:]:
            nearest = min(pairs, key=lambda p: abs(p.wavenumber - ks[-1]))
            ks.append(nearest.wavenumber)
            hs.append(h)
            levels.append(level)
        ref = richardson_reference(ks[-2], ks[-1], hs[-2], hs[-1])
        kind = "richardson-singular" if config.domain == "lshape" else "richardson"
        errors = tuple(abs(k - ref) for k in ks)
        slope = fit_slope(hs[:-1], errors[:-1]) if len(ks) >= 3 else None
        reports.append(ConvergenceReport(index, tuple(levels), tuple(hs),
                                         tuple(ks), ref, kind, errors, slope))
    return reports


def rows_to_csv(rows: Sequence[CaseRow]) -> str:
    """Deterministic CSV emission; conjugates are written as two rows."""
    out = [CSV_HEADER]
    for r in rows:
        out.append(f"{r.domain},{r.element},{r.n_kind},{r.mu:.12g},{r.level},"
                   f"{r.h:.12g},{r.index},{r.k.real:.12g},{r.k.imag:.12g},"
                   f"{r.residual:.3e}")
    return "\n".join(out) + "\n"


def reports_to_rows(config: ExperimentConfig,
                    reports: Sequence[ConvergenceReport]) -> List[CaseRow]:
    model = config.model()
    rows = []
    for rep in reports:
        for level, h, k in zip(rep.levels, rep.h, rep.k_values):
            rows.append(CaseRow(config.domain, config.element, config.n_kind,
                                model.mu, level, h, rep.index, k, 0.0))
    return rows


# --------------------------------------------------------------------------
# Published reference eigenvalues for the benchmark configurations.
# Key: table id -> list of records.  h keys "32", "64", "128" mean
# h = sqrt(2)/m on the flat domains; disk records carry the published h.
# Values with a nonzero imaginary part represent a conjugate pair.

_AFFINE = ("affine", (8.0, 1.0, -1.0), 1.0 / 9.0)
_CONST16 = ("constant", (16.0,), 1.0 / 15.0)

REFERENCE_EIGENVALUES: Dict[int, List[dict]] = {
    1: [  # MZ element, n = 8 + x1 - x2
        *[dict(domain="square", element=MZ, n=_AFFINE, j=j, h=h, value=v)
          for j, h, v in [
              ("1", "32", 2.8218574), ("1", "64", 2.8220628), ("1", "128", 2.8221545),
              ("2", "32", 3.5381161), ("2", "64", 3.5384282), ("2", "128", 3.5386203),
              ("5,6", "32", 4.4959659 + 0.8714721j),
              ("5,6", "64", 4.4963441 + 0.8714728j),
              ("5,6", "128", 4.4964963 + 0.8714802j)]],
        *[dict(domain="lshape", element=MZ, n=_AFFINE, j=j, h=h, value=v)
          for j, h, v in [
              ("1", "32", 2.3035843), ("1", "64", 2.3028188), ("1", "128", 2.3024576),
              ("2", "32", 2.3953577), ("2", "64", 2.3955964), ("2", "128", 2.3956673),
              ("5,6", "32", 2.9255876 + 0.5654338j),
              ("5,6", "64", 2.9248145 + 0.5650876j),
              ("5,6", "128", 2.9244878 + 0.5648487j)]],
        *[dict(domain="triangle", element=MZ, n=_AFFINE, j=j, h=h, value=v)
          for j, h, v in [
              ("1", "32", 2.7388174), ("1", "64", 2.7389418), ("1", "128", 2.7389765),
              ("2", "32", 3.2915472), ("2", "64", 3.2917188), ("2", "128", 3.2917696),
              ("5,6", "32", 4.1666454 + 0.7836432j),
              ("5,6", "64", 4.1666973 + 0.7836699j),
              ("5,6", "128", 4.1667103 + 0.7836780j)]],
        *[dict(domain="disk", element=MZ, n=_AFFINE, j=j, h=h, value=v)
          for j, h, v in [
              ("1", "0.025", 2.9775769), ("1", "0.012", 2.9771919), ("1", "0.006", 2.9771000),
              ("2", "0.025", 3.7774560), ("2", "0.012", 3.7770363), ("2", "0.006", 3.7769414),
              ("5,6", "0.025", 4.8741035 + 0.8760355j),
              ("5,6", "0.012", 4.8733986 + 0.8758772j),
              ("5,6", "0.006", 4.8732345 + 0.8758363j)]],
    ],
    2: [  # MZ element, n = 16
        *[dict(domain="square", element=MZ, n=_CONST16, j=j, h=h, value=v)
          for j, h, v in [
              ("1", "32", 1.8795675), ("1", "64", 1.8795717), ("1", "128", 1.8795854),
              ("2", "32", 2.4440863), ("2", "64", 2.4441734), ("2", "128", 2.4442186),
              ("3", "32", 2.4442285), ("3", "64", 2.4441893), ("3", "128", 2.4442212),
              ("4", "32", 2.8667518), ("4", "64", 2.8664156), ("4", "128", 2.8664256)]],
        *[dict(domain="lshape", element=MZ, n=_CONST16, j=j, h=h, value=v)
          for j, h, v in [
              ("1", "32", 1.4775023), ("1", "64", 1.4767526), ("1", "128", 1.4764066),
              ("2", "32", 1.5696996), ("2", "64", 1.5697172), ("2", "128", 1.5697237),
              ("3", "32", 1.7053198), ("3", "64", 1.7051917), ("3", "128", 1.7051196),
              ("4", "32", 1.7830953), ("4", "64", 1.7831002), ("4", "128", 1.7831114)]],
        *[dict(domain="triangle", element=MZ, n=_CONST16, j=j, h=h, value=v)
          for j, h, v in [
              ("1", "32", 1.8184414), ("1", "64", 1.8184573), ("1", "128", 1.8184622),
              ("2", "32", 2.2870296), ("2", "64", 2.2870557), ("2", "128", 2.2870651),
              ("3", "32", 2.2870296), ("3", "64", 2.2870557), ("3", "128", 2.2870651),
              ("4", "32", 2.8375736), ("4", "64", 2.8376056), ("4", "128", 2.8376222)]],
        *[dict(domain="disk", element=MZ, n=_CONST16, j=j, h=h, value=v)
          for j, h, v in [
              ("1", "0.025", 1.9883914), ("1", "0.012", 1.9880919), ("1", "0.006", 1.9880191),
              ("2,3", "0.025", 2.6134315), ("2,3", "0.012", 2.6130503), ("2,3", "0.006", 2.6129596),
              ("13,14", "0.049", 4.9056584 + 0.5787253j),
              ("13,14", "0.025", 4.9018623 + 0.5781361j),
              ("13,14", "0.006", 4.9009219 + 0.5781031j)]],
    ],
    3: [  # Adini element on the unit square
        *[dict(domain="square", element=ADINI, n=_AFFINE, j=j, h=h, value=v)
          for j, h, v in [
              ("1", "32", 2.8178682), ("1", "64", 2.8211011), ("1", "128", 2.8219168),
              ("2", "32", 3.532859351), ("2", "64", 3.537222143), ("2", "128", 3.538327097),
              ("5,6", "32", 4.4949831 + 0.8710067j),
              ("5,6", "64", 4.4961529 + 0.8713583j),
              ("5,6", "128", 4.4964517 + 0.8714506j)]],
        *[dict(domain="square", element=ADINI, n=_CONST16, j=j, h=h, value=v)
          for j, h, v in [
              ("1", "32", 1.8778418), ("1", "64", 1.8791512), ("1", "128", 1.8794810),
              ("2,3", "32", 2.4413924), ("2,3", "64", 2.4435179), ("2,3", "128", 2.4440561),
              ("4", "32", 2.8588866), ("4", "64", 2.8645286), ("4", "128", 2.8659601)]],
    ],
}

# exact-discretization reproduction vs. mesh-family-dependent comparison
TOLERANCE_ADINI = 1e-5
TOLERANCE_MZ = 2e-3
TOLERANCE_DISK_LIMIT = 5e-3


@dataclass(frozen=True)
class TableDiffRow:
    table: int
    domain: str
    element: str
    j: str
    h_key: str
    reference: complex
    computed: Optional[complex]
    difference: Optional[float]
    tolerance: float
    status: str   # "pass" | "fail" | "failed-solve" | "skipped"


def reproduce_tables(which: int, level_flat: int = 32, level_disk: int = 4,
                     tol: float = 1e-8) -> List[TableDiffRow]:
    """Re-solve the benchmark configurations and diff the reported values.

    Flat domains compare at the reference mesh size h = sqrt(2)/level_flat
    (records at other sizes are skipped); the disk has no matching mesh
    family, so each disk eigenvalue is compared once against the finest
    published value at the requested refinement level.
    """
    records = REFERENCE_EIGENVALUES.get(which)
    if records is None:
        raise ValueError("table id must be 1, 2 or 3")
    rows: List[TableDiffRow] = []
    cases: Dict[tuple, List[dict]] = {}
    for rec in records:
        if rec["domain"] == "disk":
            finest = min(float(r["h"]) for r in records
                         if r["domain"] == "disk" and r["j"] == rec["j"]
                         and r["n"] == rec["n"])
            if float(rec["h"]) != finest:
                continue
        elif rec["h"] != str(level_flat):
            continue
        cases.setdefault((rec["domain"], rec["element"], rec["n"]), []).append(rec)

    for (domain, element, nspec), recs in sorted(cases.items()):
        n_kind, n_params, mu = nspec
        level = level_disk if domain == "disk" else level_flat
        max_j = max(int(r["j"].split(",")[-1]) for r in recs)
        config = ExperimentConfig(domain=domain, element=element,
                                  n_kind=n_kind, n_params=n_params, mu=mu,
                                  levels=(level,), nev=max_j + 4, tol=tol,
                                  track=())
        try:
            model = config.model()
            _, _, problem = build_problem(config, level, model)
            shifts = default_shifts(config, max_j + 4)
            pairs = scan_shifts(problem, shifts, max_j + 4, tol=tol)
        except Exception as exc:  # keep diffing the remaining cases
            logger.warning("table case %s failed: %s", (domain, element), exc)
            for rec in recs:
                rows.append(TableDiffRow(which, domain, element, rec["j"],
                                         rec["h"], rec["value"], None, None,
                                         0.0, "failed-solve"))
            continue
        for rec in recs:
            ref = complex(rec["value"])
            if domain == "disk":
                tol_row = TOLERANCE_DISK_LIMIT
            else:
                tol_row = TOLERANCE_ADINI if element == ADINI else TOLERANCE_MZ
            candidates = [p.wavenumber for p in pairs
                          if p.wavenumber.imag >= -1e-12]
            if not candidates:
                rows.append(TableDiffRow(which, domain, element, rec["j"],
                                         rec["h"], ref, None, None, tol_row,
                                         "failed-solve"))
                continue
            comp = min(candidates, key=lambda k: abs(k - ref))
            diff = max(abs(comp.real - ref.real), abs(comp.imag - ref.imag))
            status = "pass" if diff <= tol_row else "fail"
            rows.append(TableDiffRow(which, domain, element, rec["j"],
                                     rec["h"], ref, comp, diff, tol_row, status))
    return rows


def table_diff_csv(rows: Sequence[TableDiffRow]) -> str:
    out = ["table,domain,element,j,h,ref_re,ref_im,comp_re,comp_im,diff,tol,status"]
    for r in rows:
        comp_re = f"{r.computed.real:.12g}" if r.computed is not None else ""
        comp_im = f"{r.computed.imag:.12g}" if r.computed is not None else ""
        diff = f"{r.difference:.3e}" if r.difference is not None else ""
        out.append(f"{r.table},{r.domain},{r.element},\"{r.j}\",{r.h_key},"
                   f"{r.reference.real:.12g},{r.reference.imag:.12g},"
                   f"{comp_re},{comp_im},{diff},{r.tolerance:.1e},{r.status}")
    return "\n".join(out) + "\n"
