"""Turn simulation CSV artifacts into publication-style PNG figures.

This package consumes only the documented CSV schemas written by the
`fracdyn` command line tool:

    trajectory.csv   t,u1,u2,u3
    snapshots.csv    t,x,u1,u2,u3            (field runs)
    snapshots.csv    t,x,u1..u3,v1..v3,e1..e3,V  (sync runs)
    errors.csv       t,e_l2,e1_sup,e2_sup,e3_sup,V
    equilibria.csv   u1,u2,u3,residual

Every figure is a pure function of the CSV bytes and the job settings:
fixed size, dpi, colormap, and axis ranges, no timestamps, so re-rendering
the same inputs yields a byte-identical file.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

KINDS = ("phase3d", "heatmap", "error_curves", "lyapunov")
DPI = 150
EPS_FLOOR = float(np.finfo(float).eps)
STATE_LIM = 0.8          # phase axes and heatmap color range, symmetric
LOG_YLIM = (1e-16, 10.0)  # fixed range for the log-scale decay figures
MASTER_COLOR = "tab:blue"
SLAVE_COLOR = "tab:red"
_SAVE_OPTS = dict(dpi=DPI, metadata={"Software": None})


class SchemaError(ValueError):
    """The CSV's columns do not fit the requested figure kind."""


@dataclass(frozen=True)
class FigureJob:
    """One figure: input CSV path(s), kind, probe coordinate, output path.

    The first input must carry the data; phase3d optionally takes an
    equilibria table as a second input to overlay the fixed points.
    """

    inputs: tuple
    kind: str
    out: Path
    probe: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if not self.inputs:
            raise ValueError("at least one input CSV is required")


def load_table(path) -> dict:
    """Parse a CSV with a header row into a dict of float columns."""
    path = Path(path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise SchemaError(f"{path}: file is empty")
    header, body = rows[0], rows[1:]
    if not body:
        raise SchemaError(f"{path}: no data rows")
    cols = {}
    try:
        data = np.array(body, dtype=float)
    except ValueError as exc:
        raise SchemaError(f"{path}: non-numeric cell ({exc})") from None
    if data.shape[1] != len(header):
        raise SchemaError(f"{path}: ragged rows")
    for j, name in enumerate(header):
        cols[name] = data[:, j]
    return cols


def field_blocks(tab):
    """Reshape a snapshots table into (t, x, {column: (nt, nx) array})."""
    if "t" not in tab or "x" not in tab:
        raise SchemaError("snapshots schema requires t and x columns")
    t, x = tab["t"], tab["x"]
    tu, xu = np.unique(t), np.unique(x)
    if len(t) != len(tu) * len(xu):
        raise SchemaError("snapshots table is not a full t-by-x block")
    order = np.lexsort((x, t))
    fields = {c: tab[c][order].reshape(len(tu), len(xu))
              for c in tab if c not in ("t", "x")}
    return tu, xu, fields


def probe_index(xu, probe) -> int:
    if probe is None:
        raise SchemaError("field CSVs need --probe to pick a spatial point")
    if not (xu.min() <= probe <= xu.max()):
        raise SchemaError(f"probe {probe} outside the domain "
                          f"[{xu.min():g}, {xu.max():g}]")
    return int(np.argmin(np.abs(xu - probe)))


def floor_log(v) -> np.ndarray:
    """Clamp a series from below so a log axis cannot see zero."""
    return np.maximum(np.asarray(v, dtype=float), EPS_FLOOR)


def phase_series(tab, probe):
    """Trajectories to draw: (times, master (n,3), slave (n,3) or None)."""
    names = set(tab)
    if {"t", "u1", "u2", "u3"} <= names and "x" not in names:
        master = np.column_stack([tab["u1"], tab["u2"], tab["u3"]])
        return tab["t"], master, None
    if {"t", "x", "u1", "u2", "u3"} <= names:
        tu, xu, fields = field_blocks(tab)
        j = probe_index(xu, probe)
        master = np.column_stack([fields[c][:, j] for c in ("u1", "u2", "u3")])
        slave = None
        if {"v1", "v2", "v3"} <= names:
            slave = np.column_stack([fields[c][:, j] for c in ("v1", "v2", "v3")])
        return tu, master, slave
    raise SchemaError("phase3d needs a trajectory or snapshots schema")


def equilibria_points(tab) -> np.ndarray:
    if not ({"u1", "u2", "u3"} <= set(tab)) or "t" in tab:
        raise SchemaError("equilibria overlay needs columns u1,u2,u3")
    return np.column_stack([tab["u1"], tab["u2"], tab["u3"]])


def endpoint_distance(traj, eq_pts) -> float:
    """Distance from the trajectory's final point to the nearest equilibrium."""
    return float(np.min(np.linalg.norm(eq_pts - traj[-1], axis=1)))


def error_series(tab):
    """(t, l2, sup (n,3)) from either the errors schema or sync snapshots."""
    names = set(tab)
    if {"t", "e_l2", "e1_sup", "e2_sup", "e3_sup"} <= names:
        sup = np.column_stack([tab["e1_sup"], tab["e2_sup"], tab["e3_sup"]])
        return tab["t"], tab["e_l2"], sup
    if {"t", "x", "e1", "e2", "e3"} <= names:
        tu, xu, fields = field_blocks(tab)
        e = np.stack([fields[c] for c in ("e1", "e2", "e3")])  # (3, nt, nx)
        sup = np.max(np.abs(e), axis=2).T
        l2 = np.sqrt(np.trapezoid(np.sum(e ** 2, axis=0), x=xu, axis=1))
        return tu, l2, sup
    raise SchemaError("error_curves needs an errors or sync snapshots schema")


def lyapunov_series(tab):
    names = set(tab)
    if {"t", "V"} <= names and "x" not in names:
        return tab["t"], tab["V"]
    if {"t", "x", "V"} <= names:
        tu, _, fields = field_blocks(tab)
        return tu, fields["V"][:, 0]  # V is constant across each t block
    raise SchemaError("lyapunov needs a V column")


# ------------------------------------------------------------- the renderers

def _render_phase3d(job, tables):
    t, master, slave = phase_series(tables[0], job.probe)
    fig = plt.figure(figsize=(6.0, 5.0))
    ax = fig.add_subplot(projection="3d")
    ax.plot(*master.T, color=MASTER_COLOR, lw=0.7, label="master")
    if slave is not None:
        ax.plot(*slave.T, color=SLAVE_COLOR, lw=0.7, label="slave")
    facts = {}
    if len(tables) > 1:
        eq_pts = equilibria_points(tables[1])
        ax.scatter(*eq_pts.T, color="black", marker="*", s=40, label="equilibria")
        dist = endpoint_distance(master, eq_pts)
        facts["endpoint_distance"] = dist
        ax.scatter(*master[-1], color=MASTER_COLOR, marker="o", s=30)
        ax.text(*master[-1], f"  end ({dist:.1e} from eq.)", fontsize=7)
    for setter in (ax.set_xlim, ax.set_ylim, ax.set_zlim):
        setter(-STATE_LIM, STATE_LIM)
    ax.set_xlabel("u1")
    ax.set_ylabel("u2")
    ax.set_zlabel("u3")
    ax.legend(loc="upper left", fontsize=8)
    return fig, facts


def _render_heatmap(job, tables):
    tu, xu, fields = field_blocks(tables[0])
    for c in ("u1", "u2", "u3"):
        if c not in fields:
            raise SchemaError("heatmap needs u1,u2,u3 field columns")
    fig, axes = plt.subplots(3, 1, figsize=(6.0, 7.5), sharex=True,
                             constrained_layout=True)
    for i, (ax, c) in enumerate(zip(axes, ("u1", "u2", "u3"))):
        pm = ax.pcolormesh(xu, tu, fields[c], cmap="RdBu_r",
                           vmin=-STATE_LIM, vmax=STATE_LIM, rasterized=True)
        ax.set_ylabel("t")
        ax.set_title(c, fontsize=9)
    axes[-1].set_xlabel("x")
    fig.colorbar(pm, ax=axes, shrink=0.8, label="field value")
    variance = float(np.var(np.stack([fields[c] for c in ("u1", "u2", "u3")])))
    return fig, {"variance": variance}


def _render_error_curves(job, tables):
    t, l2, sup = error_series(tables[0])
    fig, ax = plt.subplots(figsize=(6.0, 4.0), constrained_layout=True)
    fl2 = floor_log(l2)
    ax.semilogy(t, fl2, color="black", lw=1.2, label="L2 error")
    for i, style in enumerate(("--", "-.", ":")):
        ax.semilogy(t, floor_log(sup[:, i]), style, lw=0.9,
                    label=f"sup |e{i + 1}|")
    ax.set_ylim(*LOG_YLIM)
    ax.set_xlabel("t")
    ax.set_ylabel("error norm")
    ax.legend(fontsize=8)
    decades = float(np.log10(fl2.max() / fl2.min()))
    return fig, {"decades": decades}


def _render_lyapunov(job, tables):
    t, v = lyapunov_series(tables[0])
    fig, ax = plt.subplots(figsize=(6.0, 4.0), constrained_layout=True)
    ax.semilogy(t, floor_log(v), color=MASTER_COLOR, lw=1.2)
    ax.set_ylim(*LOG_YLIM)
    ax.set_xlabel("t")
    ax.set_ylabel("V(t)")
    ax.set_title("Lyapunov functional", fontsize=10)
    return fig, {}


_RENDERERS = {
    "phase3d": _render_phase3d,
    "heatmap": _render_heatmap,
    "error_curves": _render_error_curves,
    "lyapunov": _render_lyapunov,
}


def render(job: FigureJob):
    """Draw the figure and write it as PNG; returns (path, facts).

    `facts` carries the scalar quantities the figure annotates (endpoint
    distance, data variance, decades of decay) so callers can check what
    was drawn without parsing pixels.
    """
    tables = [load_table(p) for p in job.inputs]
    fig, facts = _RENDERERS[job.kind](job, tables)
    out = Path(job.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, **_SAVE_OPTS)
    plt.close(fig)
    return out, facts
