"""Command line front end: ``ppcf-game {solve,table,figure,selfcheck}``."""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .analytic import ErrorReport, error_norms
from .config import ConfigError, ExperimentSpec, build_spec, parse_text
from .field import Box
from .levelset import contour_metrics, extract_contour, isoperimetric_ratio, perimeter
from .solver import GameConfig, n_steps, solve_backward, validate, validate_scaling
from .tables import TABLES, run_table

EXIT_OK = 0
EXIT_SELFCHECK = 1
EXIT_CONFIG = 2
EXIT_RUNTIME = 3

log = logging.getLogger("ppcf_game")

# Level-set figures: (benchmark, times).
FIGURES = {
    1: ("circle", (0.0, 0.24, 0.48)),
    2: ("ellipse", (0.0, 0.24, 0.36)),
}
FIGURE_SETTINGS = dict(gamma=0.9, epsilon=0.04, h=0.02, scale=0.9, r0=100, l0=160)


def _add_game_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("experiment")
    g.add_argument("--config", type=Path, help="key=value experiment file")
    g.add_argument("--gamma", type=float)
    g.add_argument("--epsilon", type=float)
    g.add_argument("--scale", type=float)
    g.add_argument("--alpha1", type=float)
    g.add_argument("--alpha2", type=float)
    g.add_argument("--grid-h", dest="h", type=float)
    g.add_argument("--l0", type=int)
    g.add_argument("--r0", type=int)
    g.add_argument("--ds", type=float)
    g.add_argument("--horizon", dest="horizon_T", type=float)
    g.add_argument("--domain", help='"x0,y0,x1,y1"')
    g.add_argument("--level", type=float)
    g.add_argument("--outside", choices=("exact", "analytic", "clamp"))
    g.add_argument("--threads", type=int, help="worker threads, 0 = all cores")
    g.add_argument("--symmetry", choices=("off", "auto"))
    g.add_argument("--out", help="output directory")
    g.add_argument("--eval-box", dest="eval_box", help='"x0,y0,x1,y1" region for the error norms')


def _overrides(args) -> dict:
    keys = ("gamma", "epsilon", "scale", "alpha1", "alpha2", "h", "l0", "r0", "ds", "horizon_T",
            "level", "outside", "threads", "symmetry", "out", "eval_box")
    over = {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}
    for k in ("benchmark", "R0", "emit", "snapshots"):
        if getattr(args, k, None) is not None:
            over[k] = getattr(args, k)
    if getattr(args, "figures", None) is not None:
        over["figures"] = "yes" if args.figures else "no"
    if args.domain:
        b = Box.parse(args.domain)
        over.update(domain_min_x=b.x0, domain_min_y=b.y0, domain_max_x=b.x1, domain_max_y=b.y1)
    if "ds" in over:
        over.setdefault("r0", None)
    if "r0" in over and over["r0"] is not None:
        over.setdefault("ds", None)
    if "alpha1" in over or "alpha2" in over:
        over.setdefault("scale", None)
    return over


def _layered(args) -> dict:
    """File values, then flags; a flag choosing r0/ds or alphas/scale drops the other."""
    values = parse_text(args.config.read_text()) if args.config else {}
    over = _overrides(args)
    values.update(over)
    return {k: v for k, v in values.items() if v is not None}


def _warn(cfg: GameConfig) -> None:
    for w in validate_scaling(cfg):
        print(f"warning: {w}", file=sys.stderr)


def _load(args) -> ExperimentSpec:
    spec = build_spec(_layered(args))
    validate(spec.game)
    return spec


def run_solve(spec: ExperimentSpec) -> tuple[float, float]:
    """Run one experiment and write everything it asks for into ``spec.out``."""
    cfg = spec.game
    out = Path(spec.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "experiment.cfg").write_text(spec.to_text())
    bench = spec.make_benchmark()
    K = n_steps(cfg)
    snaps = set(spec.snapshots) or ({0, K // 2, K} if spec.emit & {"fields", "contours"} else set())
    snaps = {k for k in snaps if 0 <= k <= K}
    per_step = []
    shapes = []
    panels = []

    def observer(k, t, slc):
        if bench.exact_at is not None:
            linf, l1 = error_norms(slc, bench.exact_at(t), spec.eval_box)
            per_step.append((k, t, linf, l1))
        contour = None
        if bench.exact_at is None or k in snaps:
            contour = extract_contour(slc, cfg.contour_level)
            closed = contour.closed()
            if closed:
                m = contour_metrics(contour)
                ratio = isoperimetric_ratio(max(closed, key=perimeter))
                shapes.append((k, t, m.mean_radius, m.min_radius, m.max_radius, m.enclosed_area, ratio))
        if k in snaps:
            if "fields" in spec.emit:
                slc.to_csv(out / f"field_k{k}.csv")
            if "contours" in spec.emit:
                contour.to_csv(out / f"contour_k{k}.csv")
                contour.to_svg(out / f"contour_k{k}.svg", cfg.domain)
            panels.append((t, contour))

    solve_backward(cfg, bench.u0, observer, exact_family=bench.exact_at)
    sup = (float("nan"), float("nan"))
    if per_step:
        report = ErrorReport(per_step)
        if "errors" in spec.emit:
            report.write(out / "errors.csv")
        sup = (report.sup_linf, report.sup_l1)
        if spec.figures:
            from .plotting import plot_error_history

            plot_error_history(report, out / "errors.png")
    if shapes:
        lines = ["k,t,mean_radius,min_radius,max_radius,area,isoperimetric_ratio"]
        lines += [",".join(repr(v) for v in row) for row in shapes]
        (out / "shape.csv").write_text("\n".join(lines) + "\n")
    if spec.figures and panels:
        from .plotting import plot_contour_panels

        plot_contour_panels(sorted(panels, key=lambda p: p[0]), cfg.domain, out / "contours.png",
                            f"{bench.name}, level {cfg.contour_level:g}")
    return sup


def cmd_solve(args) -> int:
    try:
        spec = _load(args)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    _warn(spec.game)
    try:
        linf, l1 = run_solve(spec)
    except Exception as exc:  # noqa: BLE001
        log.exception("run failed")
        print(f"runtime fault: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    K = n_steps(spec.game)
    print(f"steps={K} realized_horizon={K * spec.game.epsilon ** 2:.6g}")
    print(f"sup_linf={linf!r} sup_l1={l1!r}")
    return EXIT_OK


def _table_overrides(values: dict) -> dict:
    """Game settings given on the command line or in the file, as GameConfig fields."""
    names = set(GameConfig.__dataclass_fields__)
    over = {k: v for k, v in values.items() if k in names}
    if "level" in values:
        over["contour_level"] = values["level"]
    dom = [values.get(k) for k in ("domain_min_x", "domain_min_y", "domain_max_x", "domain_max_y")]
    if any(d is not None for d in dom):
        defaults = (-2.0, -2.0, 2.0, 2.0)
        over["domain"] = Box(*(d if d is not None else dv for d, dv in zip(dom, defaults)))
    return over


def cmd_table(args) -> int:
    if args.number not in TABLES:
        print(f"config error: unknown table {args.number}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        values = _layered(args)
        out = Path(values.get("out", "."))
        over = _table_overrides(values)
        over.setdefault("symmetry", "auto")
        only = [float(v) for v in args.only.split(",")] if args.only else None
        table = TABLES[args.number]
        for row in table.rows:
            if only is None or row.value in only:
                cfg = table.config(row, **over)
                validate(cfg)
                _warn(cfg)
    except (ConfigError, ValueError, TypeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        result = run_table(args.number, over, only=only, progress=log.info)
    except Exception as exc:  # noqa: BLE001
        log.exception("table run failed")
        print(f"runtime fault: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    out.mkdir(parents=True, exist_ok=True)
    (out / f"table{args.number}.csv").write_text(result.to_csv())
    if args.figures is not False:
        from .plotting import plot_table

        plot_table(result, out / f"table{args.number}.png")
    print(result.format())
    print()
    print(result.to_csv(), end="")
    return EXIT_OK


def cmd_figure(args) -> int:
    bench_name, times = FIGURES[args.number]
    values = {**FIGURE_SETTINGS, "benchmark": bench_name, "horizon_T": max(times) + 1e-12,
              "emit": "contours", "symmetry": "auto"}
    values.update({k: v for k, v in _layered(args).items()})
    try:
        spec = build_spec(values)
        eps2 = spec.game.epsilon ** 2
        spec = replace(spec, snapshots=tuple(round(t / eps2) for t in times),
                       out=Path(values.get("out", f"figure{args.number}")))
        validate(spec.game)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    _warn(spec.game)
    try:
        run_solve(spec)
    except Exception as exc:  # noqa: BLE001
        log.exception("figure run failed")
        print(f"runtime fault: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    print((Path(spec.out) / "shape.csv").read_text(), end="")
    return EXIT_OK


def cmd_selfcheck(args) -> int:
    from .selfcheck import run_selfcheck

    checks = run_selfcheck(c_gamma_factor=args.perturb_c_gamma)
    for c in checks:
        print(f"{'PASS' if c.ok else 'FAIL'} {c.name}: {c.detail}")
    return EXIT_OK if all(c.ok for c in checks) else EXIT_SELFCHECK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ppcf-game", description=__doc__)
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run one experiment")
    _add_game_flags(p)
    p.add_argument("--benchmark", choices=("circle", "ellipse"))
    p.add_argument("--R0", type=float)
    p.add_argument("--emit", help="comma separated subset of fields,contours,errors")
    p.add_argument("--snapshots", help="comma separated step indices for fields and contours")
    p.add_argument("--figures", action=argparse.BooleanOptionalAction, default=None)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("table", help="reproduce one of the error tables")
    p.add_argument("number", type=int, choices=sorted(TABLES))
    p.add_argument("--only", help="comma separated values of the swept parameter")
    p.add_argument("--figures", action=argparse.BooleanOptionalAction, default=None)
    _add_game_flags(p)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("figure", help="level sets of the circle (1) or ellipse (2) run")
    p.add_argument("number", type=int, choices=sorted(FIGURES))
    p.add_argument("--figures", action=argparse.BooleanOptionalAction, default=None)
    _add_game_flags(p)
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("selfcheck", help="run the built-in consistency checks")
    p.add_argument("--perturb-c-gamma", type=float, default=1.0, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_selfcheck)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(asctime)s %(levelname)s %(message)s",
    )
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
