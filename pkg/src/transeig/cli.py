"""Command-line front end.

Subcommands: `mesh` (dump or validate a generated mesh), `solve` (single
case over one or more levels), `study` (convergence slopes), `tables`
(diff against the published reference eigenvalues).  Flags mirror the
ExperimentConfig keys and may also be given in a flat `key = value`
config file; command-line flags win.  Exits 0 on success and 2 when any
table comparison row fails.
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import experiments
from .elements import ADINI, MZ
from .mesh import build_disk_tri_mesh, build_square_rect_mesh, \
    build_structured_tri_mesh, validate_mesh, write_mesh


def _parse_complex(text: str) -> complex:
    return complex(text.strip().replace("i", "j"))


def _parse_config_file(path: str) -> dict:
    out = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"config line without '=': {raw.rstrip()}")
            key, value = (part.strip() for part in line.split("=", 1))
            out[key] = value
    return out


def _experiment_config(args, need_levels=True) -> experiments.ExperimentConfig:
    file_opts = _parse_config_file(args.config) if args.config else {}

    def pick(flag_value, key, convert, default=None):
        if flag_value is not None:
            return flag_value
        if key in file_opts:
            return convert(file_opts[key])
        return default

    n_kind = pick(args.n_kind, "n.kind", str, "constant")
    if n_kind == "constant":
        n_params = (pick(args.n_const, "n.const", float, 16.0),)
    elif n_kind == "affine":
        raw = pick(args.n_affine, "n.affine",
                   lambda s: tuple(float(v) for v in s.split(",")))
        if raw is None:
            raise SystemExit("affine n needs --n-affine a,b,c")
        n_params = tuple(raw)
    else:
        raise SystemExit(f"unknown n.kind {n_kind!r}")
    levels = pick(args.levels, "levels",
                  lambda s: tuple(int(v) for v in s.split(",")))
    if levels is None:
        if need_levels:
            raise SystemExit("missing --levels")
        levels = (4,)
    shifts = pick(args.shifts, "shifts",
                  lambda s: tuple(_parse_complex(v) for v in s.split(",")), ())
    track = pick(args.track, "track",
                 lambda s: tuple(int(v) for v in s.split(",")), (1,))
    return experiments.ExperimentConfig(
        domain=pick(args.domain, "domain", str),
        element=pick(args.element, "element", str),
        n_kind=n_kind, n_params=n_params,
        mu=pick(args.mu, "mu", float),
        levels=tuple(levels), shifts=tuple(shifts),
        nev=pick(args.nev, "nev", int, 8),
        tol=pick(args.tol, "tol", float, 1e-10),
        track=tuple(track),
        use_identity_mass=bool(pick(args.identity_mass or None, "identity_mass",
                                    lambda s: s.lower() in ("1", "true", "yes"),
                                    False)),
        output=pick(args.out, "out", str),
    )


def _add_case_flags(p, need_levels=True):
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--domain", choices=["square", "lshape", "triangle", "disk"])
    p.add_argument("--element", choices=[ADINI, MZ])
    p.add_argument("--n-kind", dest="n_kind", choices=["constant", "affine"])
    p.add_argument("--n-const", dest="n_const", type=float)
    p.add_argument("--n-affine", dest="n_affine",
                   type=lambda s: tuple(float(v) for v in s.split(",")),
                   metavar="A,B,C", help="n = A + B*x1 + C*x2")
    p.add_argument("--mu", type=float, help="stabilization constant override")
    p.add_argument("--levels", type=lambda s: tuple(int(v) for v in s.split(",")))
    p.add_argument("--shifts",
                   type=lambda s: tuple(_parse_complex(v) for v in s.split(",")))
    p.add_argument("--nev", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--track", type=lambda s: tuple(int(v) for v in s.split(",")))
    p.add_argument("--identity-mass", dest="identity_mass", action="store_true",
                   help="replace the mass block by the identity")
    p.add_argument("--out", help="output CSV path (default: stdout)")


def _emit(text: str, path) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_mesh(args) -> int:
    if args.domain == "disk":
        mesh = build_disk_tri_mesh(args.level)
    elif args.element == ADINI:
        mesh = build_square_rect_mesh(args.level)
    else:
        mesh = build_structured_tri_mesh(args.domain, args.level)
    diag = validate_mesh(mesh)
    print(f"ok kind={mesh.cell_kind} vertices={diag.n_vertices} "
          f"cells={diag.n_cells} edges={diag.n_edges} "
          f"boundary_edges={diag.n_boundary_edges} h_max={diag.h_max:.6g} "
          f"area={diag.area:.12g}", file=sys.stderr)
    if args.out:
        with open(args.out, "w") as fh:
            write_mesh(mesh, fh)
    elif args.dump:
        write_mesh(mesh, sys.stdout)
    return 0


def _cmd_solve(args) -> int:
    config = _experiment_config(args)
    rows = experiments.run_case(config)
    _emit(experiments.rows_to_csv(rows), config.output)
    return 0


def _cmd_study(args) -> int:
    config = _experiment_config(args)
    reports = experiments.convergence_study(config)
    rows = experiments.reports_to_rows(config, reports)
    _emit(experiments.rows_to_csv(rows), config.output)
    for rep in reports:
        slope = "n/a" if rep.slope is None else f"{rep.slope:.9f}"
        print(f"index={rep.index} reference={rep.reference:.9f} "
              f"({rep.reference_kind}) slope={slope}", file=sys.stderr)
    return 0


def _cmd_tables(args) -> int:
    rows = experiments.reproduce_tables(args.which, level_flat=args.level,
                                        level_disk=args.disk_level)
    _emit(experiments.table_diff_csv(rows), args.out)
    bad = [r for r in rows if r.status not in ("pass", "skipped")]
    for r in rows:
        print(f"table {r.table} {r.domain} {r.element} j={r.j} h={r.h_key}: "
              f"{r.status}" + (f" diff={r.difference:.2e}" if r.difference
                               is not None else ""), file=sys.stderr)
    return 2 if bad else 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="transeig",
        description="transmission eigenvalues via non-conforming plate elements")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p_mesh = sub.add_parser("mesh", help="generate, validate and dump a mesh")
    p_mesh.add_argument("--domain", required=True,
                        choices=["square", "lshape", "triangle", "disk"])
    p_mesh.add_argument("--element", choices=[ADINI, MZ], default=MZ)
    p_mesh.add_argument("--level", type=int, required=True)
    p_mesh.add_argument("--dump", action="store_true")
    p_mesh.add_argument("--out")
    p_mesh.set_defaults(func=_cmd_mesh)

    p_solve = sub.add_parser("solve", help="solve one case over given levels")
    _add_case_flags(p_solve)
    p_solve.set_defaults(func=_cmd_solve)

    p_study = sub.add_parser("study", help="convergence study with slopes")
    _add_case_flags(p_study)
    p_study.set_defaults(func=_cmd_study)

    p_tab = sub.add_parser("tables", help="diff against published values")
    p_tab.add_argument("--which", type=int, required=True, choices=[1, 2, 3])
    p_tab.add_argument("--level", type=int, default=32,
                       help="flat-domain subdivisions (default 32)")
    p_tab.add_argument("--disk-level", type=int, default=4)
    p_tab.add_argument("--out")
    p_tab.set_defaults(func=_cmd_tables)

    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
