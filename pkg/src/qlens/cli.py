"""Command-line entry points.

    qlens run --config cfg.json [--set time.t_final=0.02 ...]
    qlens sweep --config cfg.json [--set ...]
    qlens appendix-scaling [--v0 10 --epsilons 0.02,...]
    qlens validate

`run` executes the configured engine for the configured strength; `sweep`
runs the grid engine and the lens model across the strength sweep and
writes the merged CSV.  `appendix-scaling` fits the order of the
bent-vs-straight action difference.  `validate` runs a quick built-in
invariant suite and exits nonzero on any violation (the full test suite
lives in tests/ and runs under pytest).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .classical import verify_appendix_scaling
from .experiments import RunConfig, default_config, run_experiment, write_results
from .lens import evolve_rho, lens_kernel, predict_sigma2
from .observables import free_spreading, sigma2
from .packets import PacketParams, sigma_from_rho, synthesize_packet
from .potential import GaussianPotential, straight_line_integral, vector_identity_sides
from .tdse import propagate_chebyshev


def _apply_overrides(cfg_dict: dict, overrides: list) -> dict:
    for item in overrides:
        key, _, raw = item.partition("=")
        if not _:
            raise SystemExit(f"--set expects key=value, got {item!r}")
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        node = cfg_dict
        parts = key.split(".")
        for part in parts[:-1]:
            node = node[part]
        node[parts[-1]] = value
    return cfg_dict


def _load_config(args) -> RunConfig:
    if args.config:
        cfg = json.loads(Path(args.config).read_text())
    else:
        cfg = default_config().to_dict()
    cfg = _apply_overrides(cfg, args.set or [])
    return RunConfig.from_dict(cfg)


def _cmd_run(args) -> int:
    config = _load_config(args)
    if args.engine:
        config = replace(config, engine=args.engine)
    config = replace(config, sweep=None)
    result = run_experiment(config)
    path = write_results(result, config)
    print(f"wrote {path} ({len(result.rows)} rows, engine={config.engine}, "
          f"v0={config.potential.v0:g})")
    return 0


def _cmd_sweep(args) -> int:
    config = _load_config(args)
    all_rows = []
    provenance = None
    for engine in (config.engine, "lens"):
        sub = replace(config, engine=engine)
        result = run_experiment(sub, workers=args.workers)
        write_results(result, sub)
        all_rows.extend(result.rows)
        provenance = result.provenance
    all_rows.sort(key=lambda r: (r.engine, r.v0, r.t))
    from .experiments import RunResult
    merged = RunResult(rows=all_rows, provenance=provenance)
    out = Path(config.output_dir) / "sweep.csv"
    out.write_text(merged.to_csv_text())
    print(f"wrote {out} ({len(all_rows)} rows, engines={config.engine}+lens, "
          f"v0 sweep={list(config.v0_values())})")
    return 0


def _cmd_appendix_scaling(args) -> int:
    pot = GaussianPotential.axis_aligned(v0=args.v0, l1=args.l1, l2=args.l2)
    epsilons = [float(e) for e in args.epsilons.split(",")]
    report = verify_appendix_scaling(
        pot, q_start=(args.x0, args.offset), q_end=(-args.x0, args.offset),
        t=args.t, epsilons=epsilons, n_steps=args.n_steps)
    out_dir = Path(args.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "appendix_scaling.csv"
    lines = ["epsilon,delta"] + [f"{e:.17g},{d:.17g}" for e, d in report.to_rows()]
    csv_path.write_text("\n".join(lines) + "\n")
    (out_dir / "appendix_scaling.json").write_text(json.dumps({
        "slope": report.slope, "intercept": report.intercept,
        "max_fit_residual": report.max_fit_residual,
        "max_energy_drift": float(np.max(report.energy_drifts)),
    }, indent=2, sort_keys=True))
    print(f"wrote {csv_path}; slope = {report.slope:.4f}")
    return 0 if 1.9 <= report.slope <= 2.1 else 1


def _cmd_validate(args) -> int:
    """Quick self-contained invariant checks; exit 1 on the first failure."""
    failures = []
    rng = np.random.default_rng(20240811)

    def check(name, ok, detail=""):
        print(f"{'PASS' if ok else 'FAIL'}  {name}{'  ' + detail if detail else ''}")
        if not ok:
            failures.append(name)

    # determinant identity on random geometries
    worst = 0.0
    for _ in range(200):
        angle = rng.uniform(0, np.pi)
        e1 = np.array([np.cos(angle), np.sin(angle)])
        pot = GaussianPotential(v0=1.0, e1=e1, a1=rng.uniform(0.1, 100),
                                a2=rng.uniform(0.1, 100))
        q, qp = rng.uniform(-2, 2, 2), rng.uniform(-2, 2, 2)
        lhs, rhs = vector_identity_sides(pot.matrix, q, qp)
        worst = max(worst, abs(lhs - rhs) / max(1.0, abs(lhs)))
    check("determinant identity", worst <= 1e-10, f"worst {worst:.2e}")

    # closed-form line integral vs quadrature
    from scipy.integrate import quad
    pot = GaussianPotential.axis_aligned(v0=10.0, l1=0.1, l2=1.0)
    worst = 0.0
    for _ in range(25):
        q, qp = rng.uniform(-1.5, 1.5, 2), rng.uniform(-1.5, 1.5, 2)
        t = rng.uniform(0.005, 0.05)
        exact = straight_line_integral(pot, q, qp, t)
        d = q - qp
        peak = float(np.clip(-(qp @ pot.matrix @ d) / (d @ pot.matrix @ d), 0.0, 1.0))
        num = t * pot.v0 * quad(
            lambda s: float(np.exp(-np.dot(qp + s * d, pot.matrix @ (qp + s * d)))),
            0, 1, epsabs=0, epsrel=1e-13, limit=200, points=[peak])[0]
        worst = max(worst, abs(exact - num) / max(abs(num), 1e-300))
    check("line integral vs quadrature", worst <= 1e-10, f"worst {worst:.2e}")

    # lens continuity through the crossing
    params = PacketParams.from_sigma0(0.1, 60.0, -0.8)
    tc = abs(params.q_launch) / params.v
    left = sigma_from_rho(evolve_rho(params, pot, tc * (1 - 1e-12)), params.v)
    right = sigma_from_rho(evolve_rho(params, pot, tc), params.v)
    check("lens dispersion continuity", abs(left - right) <= 1e-12 * right,
          f"gap {abs(left - right):.2e}")

    # free-particle spreading on a small grid
    from .grid import GridSpec
    grid = GridSpec(x1_min=-4.0, x1_max=4.0, x2_min=-4.0, x2_max=4.0, n1=128, n2=128)
    free_params = PacketParams.from_sigma0(0.4, 8.0, -1.0)
    free_pot = GaussianPotential.axis_aligned(v0=0.0, l1=0.1, l2=1.0)
    psi0 = synthesize_packet(free_params, grid)
    snaps = propagate_chebyshev(free_pot, psi0, 0.08, snapshot_interval=0.02)
    worst = max(abs(sigma2(s.field) - free_spreading(0.4, s.t)) / free_spreading(0.4, s.t)
                for s in snaps)
    check("free-particle spreading", worst <= 2e-3, f"worst {worst:.2e}")
    worst = max(abs(s.field.norm() - 1.0) for s in snaps)
    check("norm conservation", worst <= 1e-10, f"worst {worst:.2e}")

    # lens kernel reduces to the free kernel at zero strength
    kv = lens_kernel(0.03, -0.02, 0.01, free_pot, 0.8)
    from .lens import free_kernel
    k0 = free_kernel(0.03, -0.02, 0.01)
    check("zero-strength kernel reduction", abs(kv - k0) <= 1e-15 * abs(k0))

    print(f"{len(failures)} failure(s)")
    return 1 if failures else 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="qlens",
                                     description="Wave-packet scattering by a Gaussian island")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="single run of the configured engine")
    p_run.add_argument("--config", "-c", help="JSON config (defaults to the reference setup)")
    p_run.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="override a config entry, e.g. time.t_final=0.02")
    p_run.add_argument("--engine", choices=["chebyshev", "splitstep", "eikonal", "lens"])
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="strength sweep: grid engine plus lens model")
    p_sweep.add_argument("--config", "-c")
    p_sweep.add_argument("--set", action="append", metavar="KEY=VALUE")
    p_sweep.add_argument("--workers", type=int, default=1)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_app = sub.add_parser("appendix-scaling",
                           help="order of the bent-vs-straight action difference")
    p_app.add_argument("--v0", type=float, default=10.0)
    p_app.add_argument("--l1", type=float, default=0.1)
    p_app.add_argument("--l2", type=float, default=1.0)
    p_app.add_argument("--x0", type=float, default=-0.8)
    p_app.add_argument("--offset", type=float, default=0.05)
    p_app.add_argument("--t", type=float, default=0.0267)
    p_app.add_argument("--epsilons", default="0.02,0.04,0.08,0.16,0.32")
    p_app.add_argument("--n-steps", type=int, default=4000)
    p_app.add_argument("--output-dir", default="runs")
    p_app.set_defaults(func=_cmd_appendix_scaling)

    p_val = sub.add_parser("validate", help="quick built-in invariant checks")
    p_val.set_defaults(func=_cmd_validate)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
