"""Electron through a fixed monopole: radial shot and perturbed-aim control."""

import argparse

from _common import run_preset

p = argparse.ArgumentParser(description=__doc__)
p.add_argument("--impact", type=float, default=None, help="impact parameter for the control run")
p.add_argument("--out", default=None)
args = p.parse_args()

r = run_preset("radial-passthrough", args.out)
print(f"radial: max transverse v {r['max_transverse_velocity']:.2e}, "
      f"max force {r['max_force']:.2e}, closest approach {r['closest_approach']:.2e}")


def patch(doc):
    if args.impact is not None:
        doc["simulate"]["params"]["impact"] = args.impact


c = run_preset("perturbed-aim", None, patch)
print(f"perturbed aim: deflection {c['deflection_angle']} rad")
print(f"  |V| drift per dt {c['speed_drift']}  order {c['speed_drift_order']:.2f}")
