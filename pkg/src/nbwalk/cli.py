"""Command-line front end.

Every subcommand reads a walk configuration (``--config file.json`` or
``--preset name``, optionally overridden by flags; angles in units of pi),
writes CSV/JSON into ``--out`` and leaves a ``manifest.json`` next to them.

Exit codes: 0 success, 2 usage/config error, 3 numeric or bracketing
failure, 4 resource refusal.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import EpCriterion, GridSpec, locate_ep, phase_diagram
from .bandtheory import bloch_spectrum, exceptional_theta2, gbz_circle, nonbloch_spectrum
from .dynamics import Scheme, SchemeSpec, check_margins, evolve, lattice_for
from .errors import (BracketingError, ConfigError, ContractError, DegenerateDispersionError,
                     DomainError, EpProximityError, NbWalkError, ResourceError, SingularityError,
                     SolverError)
from .export import (CSV_SCHEMA_VERSION, GBZ_HEADER, PHASE_DIAGRAM_HEADER, SITE_DUMP_HEADER,
                     SPECTRUM_HEADER, TRAJECTORY_HEADER, band_spectrum_rows, phase_diagram_rows,
                     realspace_rows, site_dump_rows, trajectory_rows, write_csv, write_json)
from .model import Boundary, WalkConfig
from .presets import available_presets, preset_record
from .spectra import KERNEL_TOL, MAX_SITES, SpectralMethod, realspace_eigenvalues

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_RESOURCE = 0, 2, 3, 4
# cells x N budgets; a real-space cell costs a dense diagonalization, a GBZ cell a few 2x2 ones
DEFAULT_MAX_WORK = {SpectralMethod.GBZ.value: 3_000_000, SpectralMethod.REALSPACE_OBC.value: 100_000}

_OVERRIDES = {
    "theta1_left": "theta1_left_pi",
    "theta2_left": "theta2_left_pi",
    "theta1_right": "theta1_right_pi",
    "theta2_right": "theta2_right_pi",
    "gamma": "gamma",
    "n_left": "n_left",
    "n_right": "n_right",
    "boundary": "boundary",
}


class UsageError(NbWalkError):
    pass


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("configuration")
    src = g.add_mutually_exclusive_group()
    src.add_argument("--config", type=Path, help="walk configuration JSON")
    src.add_argument("--preset", choices=available_presets(), help="bundled configuration")
    g.add_argument("--out", type=Path, default=Path("."), help="output directory (default: .)")
    g.add_argument("--threads", type=int, default=1, help="worker threads for grid workloads")
    g.add_argument("--seedless", action="store_true", help="reserved; all computations are deterministic")
    o = p.add_argument_group("overrides (angles in units of pi)")
    o.add_argument("--theta1-left", type=float)
    o.add_argument("--theta2-left", type=float)
    o.add_argument("--theta1-right", type=float)
    o.add_argument("--theta2-right", type=float)
    o.add_argument("--gamma", type=float)
    o.add_argument("--n-left", type=int)
    o.add_argument("--n-right", type=int)
    o.add_argument("--boundary", choices=[b.value for b in Boundary])
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="nbwalk", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", parents=[common], help="Bloch, GBZ or real-space spectrum")
    p.add_argument("--method", choices=["bloch", "gbz", "realspace"], required=True)
    p.add_argument("--region", choices=["left", "right"], default="right",
                   help="bulk used by bloch/gbz (default: right)")
    p.add_argument("--num-points", type=int, default=256)

    p = sub.add_parser("phase-diagram", parents=[common], help="max Im E over (theta1_R, theta2_R)")
    p.add_argument("--method", choices=[m.value for m in SpectralMethod], default="gbz")
    p.add_argument("--n-theta1", type=int, default=101)
    p.add_argument("--n-theta2", type=int, default=101)
    p.add_argument("--theta1-range", type=float, nargs=2, default=(-1.0, 1.0), metavar=("LO", "HI"))
    p.add_argument("--theta2-range", type=float, nargs=2, default=(-1.0, 1.0), metavar=("LO", "HI"))
    p.add_argument("--num-points", type=int, default=256)
    p.add_argument("--max-work", type=int, default=None,
                   help="refuse grids whose cells x size exceeds this "
                        "(default 3e6 for gbz, 1e5 for realspace-obc)")

    p = sub.add_parser("evolve", parents=[common], help="lossy walk and corrected probabilities")
    p.add_argument("--scheme", choices=[s.value for s in Scheme], default="domain-wall")
    p.add_argument("--steps", type=int, default=7)
    p.add_argument("--x0", type=int, default=None, help="bulk start site (default 6)")
    p.add_argument("--coin", type=int, choices=[0, 1], default=0)
    p.add_argument("--auto-size", action="store_true", help="resize the lattice to steps + 2 margins")
    p.add_argument("--site-dump", action="store_true", help="also write per-site probabilities")

    p = sub.add_parser("locate-ep", parents=[common], help="bisect for the exceptional point in theta2_R")
    p.add_argument("--criterion", choices=[c.value for c in EpCriterion], required=True)
    p.add_argument("--bracket", type=float, nargs=2, metavar=("LO", "HI"), default=None,
                   help="search interval for theta2_R in units of pi")
    p.add_argument("--scheme", choices=[s.value for s in Scheme], default=None)
    p.add_argument("--steps", type=int, default=7)
    p.add_argument("--x0", type=int, default=None)
    p.add_argument("--tol", type=float, default=1e-4, help="final bracket width in units of pi")

    p = sub.add_parser("gbz", parents=[common], help="GBZ radii and circle samples")
    p.add_argument("--num-points", type=int, default=256)
    return parser


def resolve_config(args: argparse.Namespace) -> WalkConfig:
    if args.config is not None:
        try:
            record = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
    elif args.preset is not None:
        record = preset_record(args.preset)
    else:
        raise UsageError("one of --config or --preset is required")
    for flag, key in _OVERRIDES.items():
        value = getattr(args, flag)
        if value is not None:
            record[key] = value
    return WalkConfig.from_dict(record)


def _region(config: WalkConfig, name: str):
    return config.left if name == "left" else config.right


def cmd_spectrum(args, config: WalkConfig) -> dict:
    path = args.out / "spectrum.csv"
    if args.method == "realspace":
        lam = realspace_eigenvalues(config)
        rows = realspace_rows(lam[np.abs(lam) >= KERNEL_TOL])
    elif args.method == "gbz":
        rows = band_spectrum_rows(nonbloch_spectrum(_region(config, args.region), config.gamma, args.num_points))
    else:
        rows = band_spectrum_rows(bloch_spectrum(_region(config, args.region), config.gamma, args.num_points))
    write_csv(path, SPECTRUM_HEADER, rows)
    print(f"wrote {len(rows)} rows to {path}")
    return {"spectrum": str(path)}


def cmd_phase_diagram(args, config: WalkConfig) -> dict:
    grid = GridSpec(tuple(args.theta1_range), tuple(args.theta2_range), args.n_theta1, args.n_theta2)
    size = args.num_points if args.method == SpectralMethod.GBZ.value else config.n_sites
    work = grid.cells * size
    cap = DEFAULT_MAX_WORK[args.method] if args.max_work is None else args.max_work
    if work > cap:
        raise ResourceError(
            f"{grid.cells} cells x size {size} = {work} exceeds --max-work {cap}; "
            "use a coarser grid, fewer GBZ points or a smaller lattice, or raise --max-work")
    if args.method != SpectralMethod.GBZ.value and config.n_sites > MAX_SITES:
        raise ResourceError(f"{config.n_sites} sites exceeds the cap of {MAX_SITES}")
    pd = phase_diagram(config.gamma, config.left, grid, args.method, args.num_points,
                       config.n_left, config.n_right, max(1, args.threads))
    path = write_csv(args.out / "phase_diagram.csv", PHASE_DIAGRAM_HEADER, phase_diagram_rows(pd))
    print(f"wrote {grid.cells} cells to {path}")
    return {"phase_diagram": str(path)}


def _scheme(args, default: Scheme) -> SchemeSpec:
    scheme = Scheme(args.scheme) if args.scheme else default
    if scheme is Scheme.DOMAIN_WALL:
        if args.x0 not in (None, 0):
            raise UsageError("--x0 applies to the bulk scheme only")
        return SchemeSpec.domain_wall(args.steps, getattr(args, "coin", 0))
    x0 = 6 if args.x0 is None else args.x0
    return SchemeSpec.bulk(x0, args.steps, getattr(args, "coin", 0))


def cmd_evolve(args, config: WalkConfig) -> dict:
    spec = _scheme(args, Scheme.DOMAIN_WALL)
    if args.auto_size:
        config = lattice_for(config.left, config.right, config.gamma, spec)
    check_margins(config, spec)
    traj = evolve(config, spec)
    site = spec.x0 if spec.scheme is Scheme.BULK else None
    outputs = {"trajectory": str(write_csv(args.out / "trajectory.csv", TRAJECTORY_HEADER,
                                           trajectory_rows(traj, site)))}
    if args.site_dump:
        outputs["sites"] = str(write_csv(args.out / "sites.csv", SITE_DUMP_HEADER, site_dump_rows(traj)))
    print(f"wrote {spec.steps + 1} steps to {outputs['trajectory']}")
    return outputs, config


def cmd_locate_ep(args, config: WalkConfig) -> dict:
    criterion = EpCriterion(args.criterion)
    if args.bracket is None:
        star = exceptional_theta2(config.gamma) / math.pi
        # default: bracket the analytic point on the side of the configured theta2_R
        sign = -1.0 if config.right.theta2 < 0 else 1.0
        centre = sign * (star if abs(config.right.theta2_pi) <= 0.5 else 1 - star)
        bracket = (centre - 0.03, centre + 0.03)
    else:
        bracket = tuple(args.bracket)
    default = Scheme.BULK if criterion is EpCriterion.ZERO_EXPONENT else Scheme.DOMAIN_WALL
    spec = _scheme(args, default)
    est = locate_ep(config.gamma, config.left, config.right.theta1, criterion, bracket, spec, args.tol)
    path = write_json(args.out / "ep.json", est.to_dict())
    if criterion is EpCriterion.ANALYTIC:
        print(f"{est.theta2_star_pi:.6f}")
    else:
        print(f"theta2_star_pi = {est.theta2_star_pi!r} (bracket {est.bracket_pi[0]!r}, {est.bracket_pi[1]!r})")
    return {"ep": str(path)}


def cmd_gbz(args, config: WalkConfig) -> dict:
    rows = []
    for name in ("left", "right"):
        coin = _region(config, name)
        circle = gbz_circle(coin.theta2, config.gamma, args.num_points)
        print(f"{name}: radius = {circle.radius!r}")
        rows += [(name, circle.radius, p, b.real, b.imag) for p, b in zip(circle.angles, circle.betas)]
    path = write_csv(args.out / "gbz.csv", GBZ_HEADER, rows)
    return {"gbz": str(path)}


COMMANDS = {
    "spectrum": cmd_spectrum,
    "phase-diagram": cmd_phase_diagram,
    "evolve": cmd_evolve,
    "locate-ep": cmd_locate_ep,
    "gbz": cmd_gbz,
}


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    t0 = time.perf_counter()
    try:
        config = resolve_config(args)
        outputs = COMMANDS[args.command](args, config)
        if isinstance(outputs, tuple):
            # the command ran on a resized lattice
            outputs, config = outputs
    except ResourceError as exc:
        print(f"nbwalk: refused: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (BracketingError, SolverError, EpProximityError, SingularityError,
            DegenerateDispersionError) as exc:
        print(f"nbwalk: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (UsageError, ConfigError, ContractError, DomainError) as exc:
        print(f"nbwalk: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    manifest = {
        "subcommand": args.command,
        "argv": argv,
        "config": config.to_dict(),
        "outputs": outputs,
        "tool_version": __version__,
        "csv_schema_version": CSV_SCHEMA_VERSION,
        "duration_s": time.perf_counter() - t0,
    }
    write_json(args.out / "manifest.json", manifest)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
