"""Command line front end: ``solve``, ``seeds``, ``trace`` and ``plot``.

Exit codes: 0 success, 2 usage or configuration error, 3 I/O error,
4 numerical failure in a single-shot command.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .errors import ConfigError, DomainError, ResonanceTracerError, SeedNotFoundError
from .io import (
    as_arrays,
    load_config,
    parse_complex,
    read_branch_csv,
    study_from_config,
    write_trace,
)
from .potentials import DEFAULT_PARAMS, KINDS, RadialPotential
from .solver import RadialGrid, RadialProblem
from .tracer import StudyDefinition, find_bound_state, resolve_threads, run_study

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_NUMERIC = 0, 2, 3, 4

log = logging.getLogger("resonance_tracer")

SHAPE_FLAGS = sorted({name for params in DEFAULT_PARAMS.values() for name in params})


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _default_r_end(potential):
    p = potential.params
    return {
        "gaussian": 4.8 * p.get("width", 1.0),
        "square_well": 1.1 * p.get("a", 1.0),
        "morse": p.get("r0", 1.0) + 20.0 / p.get("alpha", 1.0),
        "yukawa": 20.0 * p.get("g", 1.0),
        "lennard_jones": 10.0 * p.get("sigma", 1.0),
        "none": 1.0,
    }[potential.kind]


def _potential_from_args(args):
    params = {
        name: getattr(args, name)
        for name in DEFAULT_PARAMS[args.potential]
        if getattr(args, name) is not None
    }
    stray = [n for n in SHAPE_FLAGS if getattr(args, n) is not None and n not in params]
    if stray:
        raise ConfigError(f"--{stray[0]} does not apply to the {args.potential} potential")
    return RadialPotential(args.potential, params)


def _grid_from_args(args, potential):
    r_end = args.r_end if args.r_end is not None else _default_r_end(potential)
    return RadialGrid(r_end, args.n_points)


def _fmt_complex(z):
    return f"{z.real:.15g}{z.imag:+.15g}i"


def cmd_solve(args):
    potential = _potential_from_args(args)
    grid = _grid_from_args(args, potential)
    try:
        k = parse_complex(args.k)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    potential.check_short_range(grid.r_end, args.lam)
    problem = RadialProblem(potential, args.l, grid)
    amps = problem.amplitudes(k, args.lam)
    print(f"k    = {_fmt_complex(k)}")
    print(f"A_l  = {_fmt_complex(amps.a)}")
    print(f"B_l  = {_fmt_complex(amps.b)}")
    print(f"S_l  = {_fmt_complex(amps.s)}")
    if amps.f is None:
        print("F_l  = undefined (S_l = 1)")
    else:
        print(f"F_l  = {_fmt_complex(amps.f)}")
        scale = problem.scale((k.real, k.imag, args.lam))
        print(f"|F_l|/scale = {abs(amps.f) / scale:.6e}")
    return EXIT_OK


def cmd_seeds(args):
    potential = _potential_from_args(args)
    grid = _grid_from_args(args, potential)
    try:
        lo, hi = (float(v) for v in args.bracket.split(","))
    except ValueError:
        raise ConfigError(f"--bracket expects 'lo,hi', got {args.bracket!r}") from None
    lams = args.lam
    potential.check_short_range(grid.r_end, max(lams))
    study = StudyDefinition(potential, args.l, grid, (min(lams), max(lams)), [])
    status = EXIT_OK
    for lam in lams:
        try:
            im_k = find_bound_state(study, lam, (lo, hi))
        except SeedNotFoundError as exc:
            print(f"lambda = {lam:.10g}  no bound state: {exc}")
            status = EXIT_NUMERIC
            continue
        print(f"lambda = {lam:.10g}  Im k = {im_k:.12f}")
    return status


def cmd_trace(args):
    try:
        raw = load_config(args.config)
    except OSError as exc:
        log.error("cannot read config: %s", exc)
        return EXIT_IO
    study, out_dir = study_from_config(raw)
    out_dir = args.out or out_dir
    if out_dir is None:
        raise ConfigError("no output directory: set output.dir or pass --out")
    # --threads beats run.threads beats RESONANCE_TRACER_THREADS
    if args.threads is not None:
        study.threads = resolve_threads(args.threads)
    elif "run.threads" in raw:
        study.threads = resolve_threads(study.threads)
    else:
        study.threads = resolve_threads(None)
    branches = run_study(study)
    try:
        paths = write_trace(study, branches, out_dir)
    except OSError as exc:
        log.error("cannot write outputs: %s", exc)
        return EXIT_IO
    failed = [b.label for b in branches if b.error is not None]
    note = f"; failed seeds: {', '.join(failed)}" if failed else ""
    print(f"wrote {len(paths) - 2} branch files to {out_dir}{note}")
    return EXIT_OK


_PLOT_SCRIPT = """\
# gnuplot script written by resonance-tracer; run with: gnuplot plot.gp
set terminal pngcairo size 900,700
set key off
set output "kplane.png"
set xlabel "Re k"; set ylabel "Im k"
plot "kplane.dat" using 1:2 with lines, "events.dat" using 1:2 with points pt 7 ps 1.5
set output "imk_lambda.png"
set xlabel "lambda"; set ylabel "Im k"
plot "imk_lambda.dat" using 1:2 with lines, "events.dat" using 3:2 with points pt 7 ps 1.5
set output "rek_lambda.png"
set xlabel "lambda"; set ylabel "Re k"
plot "rek_lambda.dat" using 1:2 with lines, "events.dat" using 3:1 with points pt 7 ps 1.5
"""


def cmd_plot(args):
    study_dir = Path(args.study_dir)
    files = sorted(study_dir.glob("branch_*.csv")) if study_dir.is_dir() else []
    if not files:
        raise ConfigError(f"{study_dir}: no branch_*.csv trace files")
    out = Path(args.out) if args.out else study_dir / "plot"
    rows = []
    for f in files:
        rows += read_branch_csv(f)
    events_path = study_dir / "events.json"
    events = json.loads(events_path.read_text()) if events_path.exists() else []
    # raw CSV text is copied through so no digits are lost
    columns = {
        "kplane.dat": ("re_k", "im_k"),
        "imk_lambda.dat": ("lambda", "im_k"),
        "rek_lambda.dat": ("lambda", "re_k"),
    }
    try:
        out.mkdir(parents=True, exist_ok=True)
        for name, (cx, cy) in columns.items():
            lines = [f"# {cx} {cy}"]
            current = None
            for row in rows:
                if row["branch_id"] != current:
                    if current is not None:
                        lines += ["", ""]
                    current = row["branch_id"]
                    lines.append(f"# branch {current}")
                lines.append(f"{row[cx]} {row[cy]}")
            (out / name).write_text("\n".join(lines) + "\n")
        ev_lines = ["# re_k im_k lambda_t branch"]
        ev_lines += [
            f"{e['re_k']:.14e} {e['im_k']:.14e} {e['lambda_t']:.14e} {e['branch_id']}" for e in events
        ]
        (out / "events.dat").write_text("\n".join(ev_lines) + "\n")
        (out / "plot.gp").write_text(_PLOT_SCRIPT)
    except OSError as exc:
        log.error("cannot write plot data: %s", exc)
        return EXIT_IO
    n_branches = len(as_arrays(rows))
    print(f"wrote plot data for {n_branches} branches and {len(events)} events to {out}")
    return EXIT_OK


def _add_physics_flags(p):
    p.add_argument("--potential", required=True, choices=KINDS)
    p.add_argument("--l", type=int, required=True, help="angular momentum (0..8)")
    for name in SHAPE_FLAGS:
        p.add_argument(f"--{name}", type=float, default=None, help="shape parameter")
    p.add_argument("--r-end", type=float, default=None, help="matching radius R")
    p.add_argument("--n-points", type=int, default=8192)


def build_parser():
    parser = _Parser(prog="resonance-tracer", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="S-matrix and regularized function at one (k, lambda)")
    _add_physics_flags(p)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--k", required=True, help="complex momentum, e.g. 0+0.93i")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("seeds", help="bound states on the imaginary k axis")
    _add_physics_flags(p)
    p.add_argument("--lambda", dest="lam", type=float, action="append", required=True)
    p.add_argument("--bracket", default="0.1,3", help="Im k search interval 'lo,hi'")
    p.set_defaults(func=cmd_seeds)

    p = sub.add_parser("trace", help="run a pole-trajectory study from a config file")
    p.add_argument("config")
    p.add_argument("--out", default=None, help="output directory (overrides output.dir)")
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("plot", help="gnuplot data files from a trace directory")
    p.add_argument("study_dir")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (ConfigError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResonanceTracerError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ArithmeticError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
