"""Experiment orchestration: configs, engines, sweeps, and output files.

A run produces the time series (t, sigma2, sigma2_free, delta_sigma2) for
one engine and one island strength; a sweep repeats it over a list of
strengths.  Grid engines (chebyshev, splitstep) propagate the packet and
measure the transverse moment on snapshots; the lens engine evaluates the
analytic radius-of-curvature law; the eikonal engine sums the
semiclassical propagator onto a transverse line through the moving packet
center.

Outputs are deterministic: CSV rows are written in sorted order with
17-significant-digit floats, and a provenance sidecar records the config
hash and library versions.
"""

from __future__ import annotations

import hashlib
import json
import platform
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .eikonal import propagate_by_quadrature
from .grid import ComplexField2D, GridSpec
from .lens import predict_sigma2
from .observables import delta_sigma2, sigma2, sigma2_free, sigma_from_profile
from .packets import PacketParams, synthesize_packet
from .potential import GaussianPotential
from .tdse import propagate_chebyshev, propagate_splitstep, write_snapshot

ENGINES = ("chebyshev", "splitstep", "eikonal", "lens")

CSV_HEADER = "t,engine,v0,sigma2,sigma2_free,delta_sigma2"


@dataclass(frozen=True)
class TimeConfig:
    t_final: float = 0.032
    dt: float = 1e-3
    snapshot_interval: float = 1e-3

    def to_config(self) -> dict:
        return {"t_final": self.t_final, "dt": self.dt,
                "snapshot_interval": self.snapshot_interval}

    @classmethod
    def from_config(cls, cfg: dict) -> "TimeConfig":
        return cls(t_final=float(cfg["t_final"]), dt=float(cfg["dt"]),
                   snapshot_interval=float(cfg["snapshot_interval"]))


@dataclass(frozen=True)
class RunConfig:
    potential: GaussianPotential
    packet: PacketParams
    grid: GridSpec
    time: TimeConfig
    engine: str = "chebyshev"
    sweep: tuple | None = None          # island strengths; None runs potential.v0 only
    splitstep_dt: float | None = None   # defaults to snapshot_interval / 64
    eikonal_line_points: int = 256
    output_dir: str = "runs"
    save_snapshots: bool = False

    def __post_init__(self):
        if self.engine not in ENGINES:
            raise ValueError(f"unknown engine {self.engine!r}; choose from {ENGINES}")
        if self.sweep is not None:
            vals = tuple(float(v) for v in self.sweep)
            if len(set(vals)) != len(vals):
                raise ValueError("sweep values must be distinct")
            object.__setattr__(self, "sweep", vals)

    def v0_values(self) -> tuple:
        return self.sweep if self.sweep is not None else (self.potential.v0,)

    def to_dict(self) -> dict:
        return {
            "potential": self.potential.to_config(),
            "packet": self.packet.to_config(),
            "grid": self.grid.to_config(),
            "time": self.time.to_config(),
            "engine": self.engine,
            "sweep": list(self.sweep) if self.sweep is not None else None,
            "splitstep_dt": self.splitstep_dt,
            "eikonal_line_points": self.eikonal_line_points,
            "output_dir": self.output_dir,
            "save_snapshots": self.save_snapshots,
        }

    @classmethod
    def from_dict(cls, cfg: dict) -> "RunConfig":
        return cls(
            potential=GaussianPotential.from_config(cfg["potential"]),
            packet=PacketParams.from_config(cfg["packet"]),
            grid=GridSpec.from_config(cfg["grid"]),
            time=TimeConfig.from_config(cfg["time"]),
            engine=cfg.get("engine", "chebyshev"),
            sweep=tuple(cfg["sweep"]) if cfg.get("sweep") else None,
            splitstep_dt=cfg.get("splitstep_dt"),
            eikonal_line_points=int(cfg.get("eikonal_line_points", 256)),
            output_dir=cfg.get("output_dir", "runs"),
            save_snapshots=bool(cfg.get("save_snapshots", False)),
        )

    @classmethod
    def from_json(cls, path) -> "RunConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_json(self, path):
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True))

    def config_hash(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()


def default_config() -> RunConfig:
    """Reference setup: narrow island (l1=0.1, l2=1), fast narrow packet.

    Atomic units, v = 60, sigma0 = 0.1, launch at q1 = -0.8; strengths 10
    to 40 in the sweep.  The box is asymmetric along q1 so the packet keeps
    a >= 5 sigma margin from the boundary through t_final.
    """
    return RunConfig(
        potential=GaussianPotential.axis_aligned(v0=10.0, l1=0.1, l2=1.0),
        packet=PacketParams.from_sigma0(sigma0=0.1, v=60.0, q_launch=-0.8),
        grid=GridSpec(x1_min=-2.0, x1_max=2.8, x2_min=-1.6, x2_max=1.6,
                      n1=1024, n2=512),
        time=TimeConfig(),
        engine="chebyshev",
        sweep=(10.0, 20.0, 30.0, 40.0),
    )


@dataclass(frozen=True)
class RunRow:
    t: float
    engine: str
    v0: float
    sigma2: float
    sigma2_free: float
    delta_sigma2: float


@dataclass
class RunResult:
    rows: list
    provenance: dict
    diagnostics: dict = field(default_factory=dict)   # per (engine, v0): norms, energies

    def rows_for(self, engine: str, v0: float) -> list:
        return [r for r in self.rows if r.engine == engine and r.v0 == v0]

    def to_csv_text(self) -> str:
        lines = [CSV_HEADER]
        for r in self.rows:
            lines.append(f"{r.t:.17g},{r.engine},{r.v0:.17g},{r.sigma2:.17g},"
                         f"{r.sigma2_free:.17g},{r.delta_sigma2:.17g}")
        return "\n".join(lines) + "\n"


def _sample_times(time_cfg: TimeConfig) -> np.ndarray:
    n = int(round(time_cfg.t_final / time_cfg.snapshot_interval))
    return time_cfg.snapshot_interval * np.arange(0, n + 1)


def _run_single(config: RunConfig, engine: str, v0: float) -> tuple:
    """One engine at one strength; returns (rows, diagnostics)."""
    pot = replace(config.potential, v0=v0)
    params = config.packet
    times = _sample_times(config.time)
    rows = []
    diag = {}

    if engine in ("chebyshev", "splitstep"):
        psi0 = synthesize_packet(params, config.grid, e1=pot.e1)
        if engine == "chebyshev":
            snaps = propagate_chebyshev(pot, psi0, config.time.t_final,
                                        dt=config.time.dt,
                                        snapshot_interval=config.time.snapshot_interval)
        else:
            ss_dt = config.splitstep_dt or config.time.snapshot_interval / 64.0
            snaps = propagate_splitstep(pot, psi0, config.time.t_final, dt=ss_dt,
                                        snapshot_interval=config.time.snapshot_interval)
        diag["norms"] = [s.field.norm() for s in snaps]
        for snap in snaps:
            s2 = sigma2(snap.field)
            s2f = sigma2_free(params, snap.t)
            rows.append(RunRow(snap.t, engine, v0, s2, s2f, delta_sigma2(s2, s2f)))
        if config.save_snapshots:
            out = Path(config.output_dir) / "snapshots"
            out.mkdir(parents=True, exist_ok=True)
            for snap in snaps:
                write_snapshot(out / f"{engine}_v0_{v0:g}_t_{snap.t:.6f}.bin",
                               snap.field, t=snap.t)

    elif engine == "lens":
        for t in times:
            s2 = predict_sigma2(params, pot, float(t))
            s2f = sigma2_free(params, float(t))
            rows.append(RunRow(float(t), engine, v0, s2, s2f, delta_sigma2(s2, s2f)))

    elif engine == "eikonal":
        psi0 = synthesize_packet(params, config.grid, e1=pot.e1)
        half_width = 6.0
        n_line = config.eikonal_line_points
        for t in times:
            s2f = sigma2_free(params, float(t))
            if t == 0.0:
                s2 = params.sigma2
            else:
                center = params.q_launch + params.v * t
                ys = np.linspace(-half_width * s2f, half_width * s2f, n_line)
                pts = np.stack([np.full(n_line, center), ys], axis=-1)
                amps = propagate_by_quadrature(pot, psi0, float(t), pts)
                s2 = sigma_from_profile(ys, amps)
            rows.append(RunRow(float(t), engine, v0, s2, s2f, delta_sigma2(s2, s2f)))

    return rows, diag


def run_experiment(config: RunConfig, workers: int = 1) -> RunResult:
    """Run the configured engine over the sweep and assemble sorted rows.

    Sweep entries are independent; workers > 1 runs them concurrently.
    Rows are merged in deterministic (engine, v0, t) order regardless of
    completion order, so outputs are byte-stable.
    """
    jobs = [(config.engine, v0) for v0 in config.v0_values()]
    results = {}
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {pool.submit(_run_single, config, eng, v0): (eng, v0)
                       for eng, v0 in jobs}
            for fut, key in futures.items():
                results[key] = fut.result()
    else:
        for eng, v0 in jobs:
            results[(eng, v0)] = _run_single(config, eng, v0)

    rows = []
    diagnostics = {}
    for key in sorted(results):
        r, d = results[key]
        rows.extend(r)
        diagnostics[key] = d
    rows.sort(key=lambda r: (r.engine, r.v0, r.t))

    provenance = {
        "config_hash": config.config_hash(),
        "engine": config.engine,
        "qlens_version": __version__,
        "numpy_version": np.__version__,
        "scipy_version": scipy.__version__,
        "python_version": platform.python_version(),
    }
    return RunResult(rows=rows, provenance=provenance, diagnostics=diagnostics)


def write_results(result: RunResult, config: RunConfig) -> Path:
    """Write one CSV per (engine, v0), a merged CSV, and the provenance sidecar."""
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    for v0 in config.v0_values():
        sub = RunResult(rows=result.rows_for(config.engine, v0),
                        provenance=result.provenance)
        (out / f"run_{config.engine}_v0_{v0:g}.csv").write_text(sub.to_csv_text())
    merged = out / "sweep.csv"
    merged.write_text(result.to_csv_text())
    (out / "provenance.json").write_text(
        json.dumps(result.provenance, indent=2, sort_keys=True))
    return merged
