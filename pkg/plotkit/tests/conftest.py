"""Session fixtures: generate real CSV artifacts through the fracdyn CLI.

plotkit consumes the simulation tool only through its documented file
interface, so the fixtures shell out to the CLI exactly as a user would.
The runs use the full default resolution (dt = 0.005, 201 nodes, t in
[0, 50]); they execute once per session and are shared by all tests.
"""

import json
import subprocess
import sys

import pytest


def _fracdyn(subcommand, cfg, out_dir):
    out_dir.mkdir(parents=True, exist_ok=True)
    cfg_path = out_dir / "config.json"
    cfg_path.write_text(json.dumps(cfg))
    proc = subprocess.run(
        [sys.executable, "-m", "fracdyn.cli", subcommand,
         "--config", str(cfg_path), "--out", str(out_dir)],
        capture_output=True, text=True)
    assert proc.returncode == 0, f"{subcommand} failed: {proc.stderr}"
    return out_dir


@pytest.fixture(scope="session")
def runs(tmp_path_factory):
    base = tmp_path_factory.mktemp("fracdyn_runs")
    return {
        "equilibria": _fracdyn("equilibria", {"kind": "equilibria"},
                               base / "eq"),
        "pde90": _fracdyn("simulate-pde",
                          {"kind": "pde", "delta": 0.90, "snapshot_stride": 50},
                          base / "pde90"),
        "pde99": _fracdyn("simulate-pde",
                          {"kind": "pde", "delta": 0.99, "snapshot_stride": 50},
                          base / "pde99"),
        "sync99": _fracdyn("sync",
                           {"kind": "sync", "delta": 0.99,
                            "snapshot_stride": 50, "error_norm_stride": 10},
                           base / "sync99"),
        "ode99": _fracdyn("simulate-ode", {"kind": "ode", "delta": 0.99},
                          base / "ode99"),
    }
