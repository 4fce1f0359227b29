"""Friction-exponent sweep: higher p damps less near zero, so decay slows.

Runs the sweep preset (friction ~ s^p for p in {1, 3, 5}, weakened heat
channel so the friction is visible) through the same code path as the
command line, then tabulates the measured tail slopes.  Output lands in
demos/output/.
"""

import json
import os

from timosim.cli import cmd_sweep
from timosim.config import validate_config
from timosim.presets import get_preset

out_dir = os.path.join(os.path.dirname(__file__), "output")
cfg = validate_config(get_preset("sweep_p"))

aggregate = cmd_sweep(cfg, out_dir)

# This sweep keeps alpha = 1, so the fitted envelope (whose rate is pinned
# to the alpha integral) decays faster than the data and is reported as
# non-dominating; the quantity of interest here is the measured tail slope.
print(f"{'p':>4}  {'mu':>6}  {'tail slope':>11}  {'domination ratio':>17}  csv")
for pt in aggregate["points"]:
    fit = pt["fit"]
    print(f"{pt['point']['damping.h.p']:4.0f}  {pt['mu']:6.2f}  "
          f"{fit['tail_slope']:11.4f}  "
          f"{fit['domination_ratio']:17.3g}  {pt['csv']}")

slopes = [pt["fit"]["tail_slope"] for pt in aggregate["points"]]
print()
print("strictly slower decay as p grows:", slopes[0] < slopes[1] < slopes[2] < 0)
print(f"aggregate report: {os.path.join(out_dir, 'sweep_p_sweep.json')}")
