"""Command-line driver: run experiments, sweep the adaptation gain,
validate coupling matrix files, and probe quadratic bounds.

Exit codes: 0 when the run synchronized (or the probed bound holds),
2 when it did not, 1 on any error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import coupling
from .analysis import SyncReport, summarize
from .experiment import ConfigError, Experiment, ExperimentConfig, build_experiment
from .integrate import DivergenceError, integrate
from .oscillators import MODEL_FACTORIES, get_model, quad_probe
from .presets import PRESETS, get_preset

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_SYNCHRONIZED = 2

SEED_ENV_VAR = "ADAPTSYNC_SEED"


class CliError(Exception):
    pass


def _load_config_dict(args) -> dict:
    if args.preset and args.config:
        raise CliError("give either --preset or --config, not both")
    if args.preset:
        try:
            return get_preset(args.preset)
        except ValueError as exc:
            raise CliError(str(exc))
    if args.config:
        cfg = ExperimentConfig.from_json_file(args.config)
        return cfg.to_dict()
    raise CliError("one of --preset or --config is required")


def _apply_overrides(d: dict, args) -> dict:
    """Flag overrides beat the environment seed, which beats the config."""
    env_seed = os.environ.get(SEED_ENV_VAR)
    if env_seed is not None:
        try:
            d["initial_seed"] = int(env_seed)
        except ValueError:
            raise CliError(f"{SEED_ENV_VAR} must be an integer, got {env_seed!r}")
    if getattr(args, "alpha", None) is not None and not isinstance(args.alpha, list):
        d["alpha"] = args.alpha
    if args.seed is not None:
        d["initial_seed"] = args.seed
    if args.n_nodes is not None:
        if "n_nodes" in d.get("network", {}):
            d["network"]["n_nodes"] = args.n_nodes
        elif d.get("network", {}).get("generator") != "three-node-rotating":
            d.setdefault("network", {})["n_nodes"] = args.n_nodes
    if args.t_end is not None:
        d.setdefault("integrator", {})["t_end"] = args.t_end
    if args.step is not None:
        d.setdefault("integrator", {})["step"] = args.step
    return d


def _resolve(args) -> ExperimentConfig:
    return ExperimentConfig.from_dict(_apply_overrides(_load_config_dict(args), args))


def _write_trajectory_csv(path: Path, traj) -> None:
    columns = zip(
        traj.times.tolist(),
        traj.c_series.tolist(),
        traj.e_series.tolist(),
        traj.v_series.tolist(),
    )
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("t,c,E,V\n")
        for t, c, e, v in columns:
            fh.write(f"{t!r},{c!r},{e!r},{v!r}\n")


def _write_summary(out_dir: Path, name: str, report: SyncReport) -> None:
    with open(out_dir / f"{name}_summary.csv", "w", encoding="ascii", newline="\n") as fh:
        fh.write(SyncReport.CSV_HEADER + "\n")
        fh.write(report.to_csv_row() + "\n")
    with open(out_dir / f"{name}_summary.json", "w", encoding="ascii", newline="\n") as fh:
        fh.write(report.to_json() + "\n")


def _run_one(exp: Experiment):
    traj = integrate(exp.scheme, exp.model, exp.x0, exp.int_config)
    report = summarize(traj, threshold=exp.config.threshold, window=exp.config.window)
    return traj, report


def cmd_run(args) -> int:
    cfg = _resolve(args)
    if args.dump_config:
        print(cfg.to_json())
        return EXIT_OK
    exp = build_experiment(cfg)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    try:
        traj, report = _run_one(exp)
    except DivergenceError as exc:
        prefix = exc.trajectory
        last_t = prefix.times[-1] if prefix.times.size else 0.0
        print(f"error: {exc} (last finite sample at t={last_t!r})", file=sys.stderr)
        return EXIT_ERROR

    _write_trajectory_csv(out_dir / f"{cfg.name}_trajectory.csv", traj)
    _write_summary(out_dir, cfg.name, report)
    if args.svg:
        from .plots import render_trajectory_figure

        render_trajectory_figure(traj, out_dir / f"{cfg.name}.svg", title=cfg.name)

    print(
        f"{cfg.name}: synchronized={str(report.synchronized).lower()} "
        f"e_final={report.e_final:.3e} c_final={report.c_final:.6g} "
        f"time_to_sync={report.time_to_sync:.6g}"
    )
    return EXIT_OK if report.synchronized else EXIT_NOT_SYNCHRONIZED


def _parse_alpha_list(values: list[str]) -> list[float]:
    alphas: list[float] = []
    for chunk in values:
        for part in str(chunk).split(","):
            part = part.strip()
            if not part:
                continue
            alphas.append(float(part))
    return alphas


def cmd_sweep(args) -> int:
    alphas = _parse_alpha_list(args.alpha or [])
    if not alphas:
        raise CliError("sweep needs at least one --alpha value")
    cfg = _resolve(args)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    rows = []
    any_error = False
    any_unsynced = False
    for alpha in sorted(alphas):
        d = cfg.to_dict()
        d["alpha"] = alpha
        d["name"] = f"{cfg.name}-alpha{alpha:g}"
        try:
            exp = build_experiment(ExperimentConfig.from_dict(d))
            traj, report = _run_one(exp)
            status = "ok" if report.synchronized else "not-synchronized"
            any_unsynced |= not report.synchronized
            rows.append(
                (alpha, repr(report.c_final), repr(report.time_to_sync)
                 if math.isfinite(report.time_to_sync) else "inf",
                 repr(report.e_final), status)
            )
        except (ConfigError, DivergenceError, ValueError) as exc:
            any_error = True
            rows.append((alpha, "", "", "", f"error: {exc}"))

    table_path = out_dir / f"{cfg.name}_sweep.csv"
    with open(table_path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("alpha,c_final,time_to_sync,e_final,status\n")
        for alpha, c_final, tts, e_final, status in rows:
            fh.write(f"{alpha!r},{c_final},{tts},{e_final},{status}\n")

    for alpha, c_final, tts, e_final, status in rows:
        print(f"alpha={alpha:g}: {status} c_final={c_final} e_final={e_final}")
    if args.svg:
        from .plots import render_sweep_figure

        ok = [(a, float(c)) for a, c, _, _, s in rows if s == "ok"]
        if ok:
            render_sweep_figure(
                [a for a, _ in ok],
                [c for _, c in ok],
                out_dir / f"{cfg.name}_sweep.svg",
                title=cfg.name,
            )

    if any_error:
        return EXIT_ERROR
    return EXIT_NOT_SYNCHRONIZED if any_unsynced else EXIT_OK


def cmd_validate_matrix(args) -> int:
    arr = coupling.read_matrix(args.path)
    tag, violations = coupling.validate_condition(arr)
    irreducible = coupling.is_irreducible(arr)
    print(f"class: {tag}")
    print(f"irreducible: {str(irreducible).lower()}")
    for v in violations:
        print(f"violation: {v}")
    if tag == coupling.TAG_INVALID:
        return EXIT_NOT_SYNCHRONIZED
    xi = coupling.left_eigenvector(arr)
    print("xi: " + " ".join(f"{v:.12g}" for v in xi.xi))
    lam = coupling.lambda2(arr, xi)
    print(f"lambda2: {lam:.12g}")
    proj = coupling.build_projection(xi)
    neg_u_tag, _ = coupling.validate_condition(-proj.u)
    print(f"minus_projection_class: {neg_u_tag}")
    return EXIT_OK


def _parse_box(spec: str, dim: int) -> np.ndarray:
    try:
        pairs = [
            tuple(float(v) for v in part.split(":")) for part in spec.split(",")
        ]
    except ValueError:
        raise CliError(f"cannot parse box {spec!r}; expected lo:hi[,lo:hi,...]")
    if any(len(p) != 2 for p in pairs):
        raise CliError(f"cannot parse box {spec!r}; expected lo:hi[,lo:hi,...]")
    if len(pairs) == 1:
        pairs = pairs * dim
    if len(pairs) != dim:
        raise CliError(f"box needs 1 or {dim} lo:hi pairs, got {len(pairs)}")
    return np.array(pairs)


def _parse_delta(spec: str, dim: int) -> np.ndarray:
    parts = spec.split(":")
    try:
        values = [float(p) for p in parts]
    except ValueError:
        raise CliError(f"cannot parse delta candidate {spec!r}")
    if len(values) == 1:
        return np.full(dim, values[0])
    if len(values) != dim:
        raise CliError(f"delta candidate needs 1 or {dim} values, got {len(values)}")
    return np.array(values)


def cmd_quad_check(args) -> int:
    try:
        model = get_model(args.model)
    except ValueError as exc:
        raise CliError(str(exc))
    box = _parse_box(args.box, model.dim) if args.box else None
    candidates = args.delta or ["0"]

    held = None
    for spec in candidates:
        delta = _parse_delta(spec, model.dim)
        cert = quad_probe(
            model,
            delta,
            varpi=args.varpi,
            box=box,
            n_samples=args.samples,
            rng_seed=args.seed if args.seed is not None else 0,
        )
        print(
            f"delta={spec} varpi={args.varpi:g} max_violation={cert.max_violation!r} "
            f"holds={str(cert.holds).lower()}"
        )
        print(
            "  argmax_x: " + " ".join(f"{v:.6g}" for v in cert.worst_x)
            + " | argmax_y: " + " ".join(f"{v:.6g}" for v in cert.worst_y)
        )
        if cert.holds and held is None:
            held = spec
    if held is not None:
        print(f"smallest consistent delta: {held}")
        return EXIT_OK
    print("no candidate was consistent with the bound on the samples")
    return EXIT_NOT_SYNCHRONIZED


def _add_common_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--preset", help="named preset (see --list-presets)")
    p.add_argument("--config", help="JSON experiment config file")
    p.add_argument("--seed", type=int, help="initial-condition seed override")
    p.add_argument("--n-nodes", type=int, help="network size override")
    p.add_argument("--t-end", type=float, help="horizon override")
    p.add_argument("--step", type=float, help="integration step override")
    p.add_argument("--out-dir", default=".", help="output directory")
    p.add_argument("--svg", action="store_true", help="also render SVG figures")
    p.add_argument(
        "--dump-config",
        action="store_true",
        help="print the resolved config as JSON and exit",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="adaptsync",
        description="Synchronize coupled chaotic oscillators with an "
        "adaptive coupling strength",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one experiment")
    _add_common_run_flags(p_run)
    p_run.add_argument("--alpha", type=float, help="adaptation gain override")
    p_run.add_argument(
        "--list-presets", action="store_true", help="list preset names and exit"
    )
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="run one trajectory per adaptation gain")
    _add_common_run_flags(p_sweep)
    p_sweep.add_argument(
        "--alpha",
        action="append",
        help="adaptation gain(s); repeatable or comma-separated",
    )
    p_sweep.set_defaults(func=cmd_sweep)

    p_val = sub.add_parser("validate-matrix", help="classify a matrix file")
    p_val.add_argument("path")
    p_val.set_defaults(func=cmd_validate_matrix)

    p_quad = sub.add_parser(
        "quad-check", help="probe a one-sided quadratic bound on a model"
    )
    p_quad.add_argument("--model", required=True, help="|".join(sorted(MODEL_FACTORIES)))
    p_quad.add_argument(
        "--delta",
        action="append",
        help="candidate diagonal (scalar or colon-separated values); repeatable",
    )
    p_quad.add_argument("--varpi", type=float, default=1.0)
    p_quad.add_argument("--box", help="sampling box lo:hi[,lo:hi,...]")
    p_quad.add_argument("--samples", type=int, default=10_000)
    p_quad.add_argument("--seed", type=int, default=None)
    p_quad.set_defaults(func=cmd_quad_check)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; fold into the error code
        return EXIT_OK if exc.code in (0, None) else EXIT_ERROR

    if getattr(args, "list_presets", False):
        for name in sorted(PRESETS):
            print(name)
        return EXIT_OK

    try:
        return args.func(args)
    except (CliError, ConfigError, coupling.MatrixParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (coupling.StructuralError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
