"""Command-line front end: run experiments from JSON configs, write CSVs.

Subcommands: equilibria, stability, simulate-ode, simulate-pde, sync.  Each
takes --config (JSON), --out (output directory; falls back to the
FRACDYN_OUT_DIR environment variable, then ./fracdyn_runs) and --threads.
Every run writes a manifest.json echoing the fully resolved spec, so a run
can be replayed bit-identically from its manifest alone.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time as _time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .fractional import DivergenceError, TimeGrid, abm_solve
from .newton_leipnik import SystemParams, equilibria, jacobian, vector_field
from .pde import Field, Grid1D, RDConfig, default_initial_conditions, simulate_rd
from .stability import deng_stable, matignon_margin
from .synchronization import SyncConfig, lyapunov_V, run_sync

ENV_OUT_DIR = "FRACDYN_OUT_DIR"
KINDS = ("equilibria", "stability", "ode", "pde", "sync")

# configuration keys accepted per kind; anything else is rejected so typos
# fail loudly instead of silently running defaults
_COMMON = {"kind", "a", "alpha"}
_ALLOWED = {
    "equilibria": _COMMON,
    "stability": _COMMON | {"delta", "rational_orders"},
    "ode": _COMMON | {"delta", "x0", "dt", "t_end", "snapshot_stride",
                      "memory_window"},
    "pde": _COMMON | {"delta", "d", "length", "n_nodes", "dt", "t_end",
                      "snapshot_stride", "memory_window"},
    "sync": _COMMON | {"delta", "d", "length", "n_nodes", "dt", "t_end",
                       "snapshot_stride", "memory_window", "controller_enabled",
                       "slave_scale", "slave_offset", "phi2_cross_term",
                       "error_norm_stride"},
}


@dataclass(frozen=True)
class ExperimentSpec:
    """Fully resolved description of one run (defaults already applied)."""

    kind: str
    a: float = 0.4
    alpha: float = 0.175
    delta: tuple | None = None          # 3 orders; None only for equilibria
    rational_orders: tuple | None = None  # stability only, e.g. ("17/20", ...)
    x0: tuple = (0.349, 0.0, -0.3)
    d: tuple = (0.1, 0.1, 0.1)
    length: float = 20.0
    n_nodes: int = 201
    dt: float = 0.005
    t_end: float = 50.0
    snapshot_stride: int = 10
    memory_window: int | None = None
    controller_enabled: bool = True
    slave_scale: float = 1.5
    slave_offset: float = 0.0
    phi2_cross_term: str = "e1e3"
    error_norm_stride: int = 10

    def params(self) -> SystemParams:
        return SystemParams(a=self.a, alpha=self.alpha, d=self.d)

    def time_grid(self) -> TimeGrid:
        n_steps = int(round(self.t_end / self.dt))
        if abs(n_steps * self.dt - self.t_end) > 1e-9 * max(1.0, self.t_end):
            raise ValueError(f"t_end = {self.t_end} is not a multiple of dt = {self.dt}")
        return TimeGrid(t0=0.0, dt=self.dt, n_steps=n_steps)


def parse_spec(text: str, kind: str | None = None) -> ExperimentSpec:
    """Build a spec from JSON text; `kind` (from the subcommand) fills in a
    missing "kind" entry and must agree with an explicit one."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"config is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ValueError("config must be a JSON object")
    cfg_kind = raw.get("kind", kind)
    if cfg_kind is None:
        raise ValueError('config needs a "kind" entry (or pass one via the CLI)')
    if kind is not None and cfg_kind != kind:
        raise ValueError(f'config kind "{cfg_kind}" does not match subcommand "{kind}"')
    if cfg_kind not in KINDS:
        raise ValueError(f'unknown kind "{cfg_kind}"; expected one of {KINDS}')
    unknown = set(raw) - _ALLOWED[cfg_kind]
    if unknown:
        raise ValueError(f"unknown keys for kind {cfg_kind!r}: {sorted(unknown)}")

    kw: dict = {"kind": cfg_kind}
    for name in ("a", "alpha", "dt", "t_end", "length", "slave_scale",
                 "slave_offset"):
        if name in raw:
            kw[name] = _finite(raw[name], name)
    for name in ("n_nodes", "snapshot_stride", "error_norm_stride"):
        if name in raw:
            kw[name] = _positive_int(raw[name], name)
    if "memory_window" in raw and raw["memory_window"] is not None:
        kw["memory_window"] = _positive_int(raw["memory_window"], "memory_window")
    if "controller_enabled" in raw:
        if not isinstance(raw["controller_enabled"], bool):
            raise ValueError("controller_enabled must be true or false")
        kw["controller_enabled"] = raw["controller_enabled"]
    if "phi2_cross_term" in raw:
        kw["phi2_cross_term"] = str(raw["phi2_cross_term"])
    if "x0" in raw:
        kw["x0"] = _triple(raw["x0"], "x0")
    if "d" in raw:
        kw["d"] = _triple(raw["d"], "d")
    if "delta" in raw:
        v = raw["delta"]
        if isinstance(v, (int, float)):
            kw["delta"] = (float(v),) * 3
        else:
            kw["delta"] = _triple(v, "delta")
        for x in kw["delta"]:
            if not (0.0 < x <= 1.0):
                raise ValueError(f"delta entries must lie in (0, 1], got {x}")
    if "rational_orders" in raw:
        ro = raw["rational_orders"]
        if not isinstance(ro, (list, tuple)) or len(ro) != 3:
            raise ValueError("rational_orders must be a list of 3 strings like '17/20'")
        for s in ro:
            Fraction(str(s))  # raises ValueError on malformed input
        kw["rational_orders"] = tuple(str(s) for s in ro)

    if cfg_kind in ("ode", "pde", "sync") and "delta" not in kw:
        raise ValueError(f'kind {cfg_kind!r} requires "delta"')
    spec = ExperimentSpec(**kw)
    if spec.kind in ("ode", "pde", "sync"):
        spec.time_grid()  # validates that t_end is a multiple of dt
    return spec


def spec_to_dict(spec: ExperimentSpec) -> dict:
    """Resolved, kind-relevant JSON form; parse_spec(json(...)) round-trips."""
    out = {"kind": spec.kind, "a": spec.a, "alpha": spec.alpha}
    if spec.kind == "stability":
        if spec.delta is not None:
            out["delta"] = list(spec.delta)
        if spec.rational_orders is not None:
            out["rational_orders"] = list(spec.rational_orders)
    if spec.kind == "ode":
        out.update(delta=list(spec.delta), x0=list(spec.x0), dt=spec.dt,
                   t_end=spec.t_end, snapshot_stride=spec.snapshot_stride,
                   memory_window=spec.memory_window)
    if spec.kind in ("pde", "sync"):
        out.update(delta=list(spec.delta), d=list(spec.d), length=spec.length,
                   n_nodes=spec.n_nodes, dt=spec.dt, t_end=spec.t_end,
                   snapshot_stride=spec.snapshot_stride,
                   memory_window=spec.memory_window)
    if spec.kind == "sync":
        out.update(controller_enabled=spec.controller_enabled,
                   slave_scale=spec.slave_scale, slave_offset=spec.slave_offset,
                   phi2_cross_term=spec.phi2_cross_term,
                   error_norm_stride=spec.error_norm_stride)
    return out


def _finite(v, name) -> float:
    if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
        raise ValueError(f"{name} must be a finite number, got {v!r}")
    return float(v)


def _positive_int(v, name) -> int:
    if not isinstance(v, int) or isinstance(v, bool) or v < 1:
        raise ValueError(f"{name} must be a positive integer, got {v!r}")
    return v


def _triple(v, name) -> tuple:
    if not isinstance(v, (list, tuple)) or len(v) != 3:
        raise ValueError(f"{name} must be a list of 3 numbers")
    return tuple(_finite(x, name) for x in v)


def _fmt(x) -> str:
    return f"{float(x):.17g}"


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([c if isinstance(c, str) else _fmt(c) for c in row])


def run(spec: ExperimentSpec, out_dir: Path, threads: int = 1) -> list[Path]:
    """Execute one experiment; returns the written file paths."""
    if threads < 1:
        raise ValueError("threads must be >= 1")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    started = _time.time()
    runner = {
        "equilibria": _run_equilibria,
        "stability": _run_stability,
        "ode": _run_ode,
        "pde": _run_pde,
        "sync": _run_sync,
    }[spec.kind]
    paths = runner(spec, out_dir, threads)
    derived = {}
    if spec.kind in ("pde", "sync"):
        derived["dx"] = spec.length / (spec.n_nodes - 1)
    if spec.kind in ("ode", "pde", "sync"):
        derived["n_steps"] = spec.time_grid().n_steps
        derived["d"] = list(spec.d) if spec.kind != "ode" else None
    if spec.kind == "sync":
        derived["slave_ic_rule"] = (f"slave = {spec.slave_scale:g} * master"
                                    f" + {spec.slave_offset:g}")
    manifest = {
        "tool": "fracdyn",
        "version": __version__,
        "kind": spec.kind,
        "spec": spec_to_dict(spec),
        "derived": derived,
        "outputs": [p.name for p in paths],
        "runtime_seconds": round(_time.time() - started, 3),
    }
    mpath = out_dir / "manifest.json"
    mpath.write_text(json.dumps(manifest, indent=2) + "\n")
    return paths + [mpath]


def _run_equilibria(spec, out_dir, threads):
    res = equilibria(spec.params())
    rows = [list(eq.point) + [eq.residual] for eq in res]
    path = out_dir / "equilibria.csv"
    _write_csv(path, ["u1", "u2", "u3", "residual"], rows)
    if not res.complete:
        print("warning: some Newton seeds failed to converge", file=sys.stderr)
    return [path]


def _run_stability(spec, out_dir, threads):
    p = spec.params()
    eqs = list(equilibria(p))
    frac_orders = None
    if spec.rational_orders is not None:
        frac_orders = [Fraction(s) for s in spec.rational_orders]

    def analyse(item):
        idx, eq = item
        jac = jacobian(p, eq.point)
        rep = matignon_margin(jac)
        row = [f"E{idx + 1}"] + list(eq.point)
        for lam in rep.eigenvalues:
            row += [lam.real, lam.imag]
        row += [rep.worst_arg, rep.margin]
        if spec.delta is not None:
            row.append(int(rep.is_stable(spec.delta[0])))
        if frac_orders is not None:
            row.append(int(deng_stable(jac, frac_orders).stable))
        return idx, row

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(analyse, enumerate(eqs)))
    else:
        results = [analyse(item) for item in enumerate(eqs)]
    results.sort(key=lambda r: r[0])

    header = ["equilibrium", "u1", "u2", "u3",
              "eig1_re", "eig1_im", "eig2_re", "eig2_im", "eig3_re", "eig3_im",
              "worst_arg", "margin"]
    if spec.delta is not None:
        header.append("stable_at_delta")
    if frac_orders is not None:
        header.append("deng_stable")
    path = out_dir / "stability.csv"
    _write_csv(path, header, [row for _, row in results])
    return [path]


def _run_ode(spec, out_dir, threads):
    p = spec.params()
    grid = spec.time_grid()
    res = abm_solve(lambda t, x: vector_field(p, x), spec.x0, spec.delta, grid,
                    memory_window=spec.memory_window)
    sel = list(range(0, grid.n_steps + 1, spec.snapshot_stride))
    if sel[-1] != grid.n_steps:
        sel.append(grid.n_steps)
    rows = ([res.times[k]] + list(res.states[k]) for k in sel)
    path = out_dir / "trajectory.csv"
    _write_csv(path, ["t", "u1", "u2", "u3"], rows)
    return [path]


def _rd_config(spec) -> RDConfig:
    return RDConfig(
        params=spec.params(),
        orders=spec.delta,
        grid=Grid1D(length=spec.length, n_nodes=spec.n_nodes),
        time=spec.time_grid(),
        snapshot_stride=spec.snapshot_stride,
        memory_window=spec.memory_window,
    )


def _run_pde(spec, out_dir, threads):
    traj = simulate_rd(_rd_config(spec))
    x = traj.grid.nodes()
    rows = (
        [traj.times[i], x[j]] + list(traj.fields[i, :, j])
        for i in range(len(traj.times))
        for j in range(traj.grid.n_nodes)
    )
    path = out_dir / "snapshots.csv"
    _write_csv(path, ["t", "x", "u1", "u2", "u3"], rows)
    return [path]


def _run_sync(spec, out_dir, threads):
    rd = _rd_config(spec)
    master = default_initial_conditions(rd.grid)
    slave = Field(grid=rd.grid, u=spec.slave_scale * master.u + spec.slave_offset)
    cfg = SyncConfig(
        rd=rd,
        controller_enabled=spec.controller_enabled,
        phi2_cross_term=spec.phi2_cross_term,
        master_ic=master,
        slave_ic=slave,
        error_norm_stride=spec.error_norm_stride,
    )
    res = run_sync(cfg)
    x = rd.grid.nodes()

    # V on the snapshot grid, recomputed from the stored fields
    v_snap = [lyapunov_V(Field(grid=rd.grid, u=res.slave[i] - res.master[i]))
              for i in range(len(res.times))]

    def snapshot_rows():
        for i in range(len(res.times)):
            err = res.slave[i] - res.master[i]
            for j in range(rd.grid.n_nodes):
                yield ([res.times[i], x[j]]
                       + list(res.master[i, :, j])
                       + list(res.slave[i, :, j])
                       + list(err[:, j])
                       + [v_snap[i]])

    spath = out_dir / "snapshots.csv"
    _write_csv(spath,
               ["t", "x", "u1", "u2", "u3", "v1", "v2", "v3",
                "e1", "e2", "e3", "V"],
               snapshot_rows())

    epath = out_dir / "errors.csv"
    _write_csv(epath,
               ["t", "e_l2", "e1_sup", "e2_sup", "e3_sup", "V"],
               ([res.norm_times[i], res.l2[i]] + list(res.sup[i])
                + [res.lyapunov[i]] for i in range(len(res.norm_times))))
    return [spath, epath]


_SUBCOMMANDS = {
    "equilibria": "equilibria",
    "stability": "stability",
    "simulate-ode": "ode",
    "simulate-pde": "pde",
    "sync": "sync",
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="fracdyn",
        description="fractional-order dynamics: equilibria, stability, "
                    "simulation, and synchronisation runs",
    )
    sub = ap.add_subparsers(dest="command", required=True)
    for name, kind in _SUBCOMMANDS.items():
        sp = sub.add_parser(name, help=f"run a {kind!r} experiment")
        sp.add_argument("--config", required=True,
                        help="path to the JSON experiment config")
        sp.add_argument("--out", default=None,
                        help=f"output directory (default: ${ENV_OUT_DIR} "
                             f"or ./fracdyn_runs)")
        sp.add_argument("--threads", type=int, default=1,
                        help="worker threads for per-equilibrium analysis")
        sp.set_defaults(kind=kind)
    return ap


def resolve_out_dir(flag_value: str | None) -> Path:
    if flag_value:
        return Path(flag_value)
    env = os.environ.get(ENV_OUT_DIR)
    if env:
        return Path(env)
    return Path("fracdyn_runs")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = Path(args.config).read_text()
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 2
    try:
        spec = parse_spec(text, kind=args.kind)
        out_dir = resolve_out_dir(args.out)
        paths = run(spec, out_dir, threads=args.threads)
    except (ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for p in paths:
        print(p)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
