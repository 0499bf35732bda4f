"""Master-slave synchronisation with a cross-term-cancelling controller.

Two copies of the reaction-diffusion system start 50% apart.  The slave
receives an additive control built so that the error field obeys a linear,
provably stable system: all quadratic interactions cancel algebraically.
The L2 error then contracts roughly like exp(-0.4 t) regardless of the
fractional order; with the controller switched off the two chaotic fields
never agree.
"""

import numpy as np

from fracdyn import (Field, Grid1D, RDConfig, SyncConfig, SystemParams,
                     TimeGrid, default_initial_conditions, run_sync)

p = SystemParams(a=0.4, alpha=0.175, d=(0.1, 0.1, 0.1))
grid = Grid1D(length=20.0, n_nodes=101)
tg = TimeGrid(0.0, 0.01, 2000)  # t in [0, 20]
rd = RDConfig(params=p, orders=(0.99,) * 3, grid=grid, time=tg,
              snapshot_stride=200)

on = run_sync(SyncConfig(rd=rd, error_norm_stride=50))
off = run_sync(SyncConfig(rd=rd, controller_enabled=False, error_norm_stride=50))

print("      t     L2 error (on)    L2 error (off)     V (on)")
for i in range(0, len(on.norm_times), 4):
    print(f"  {on.norm_times[i]:5.1f}   {on.l2[i]:14.6e} {off.l2[i]:16.6e}"
          f" {on.lyapunov[i]:12.4e}")

print(f"\ncontrolled decay factor over [0, 20]: {on.l2[-1] / on.l2[0]:.2e}")
print(f"Lyapunov functional monotone: {bool(np.all(np.diff(on.lyapunov) <= 0))}")

# incommensurate orders change nothing qualitatively: the cancelled error
# system is the same linear field for any order triple
rd_i = RDConfig(params=p, orders=(0.97, 0.98, 0.99), grid=grid, time=tg,
                snapshot_stride=200)
mixed = run_sync(SyncConfig(rd=rd_i, error_norm_stride=50))
print(f"incommensurate (0.97, 0.98, 0.99) decay: {mixed.l2[-1] / mixed.l2[0]:.2e}")
