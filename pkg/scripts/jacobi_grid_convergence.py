"""Grid Jacobi residual: direct finite-difference value against the closed form.

Prints the discrepancy at each refinement level and the fitted order.
Use --small for the 8^3 x 8^3 version (about 20 s instead of 75 s).
"""

import argparse

from _common import run_preset

p = argparse.ArgumentParser(description=__doc__)
p.add_argument("--small", action="store_true")
p.add_argument("--solenoidal", action="store_true", help="run the divergence-free B case instead")
p.add_argument("--out", default=None)
args = p.parse_args()

name = "jacobi-grid-solenoidal" if args.solenoidal else (
    "jacobi-grid-divergent-small" if args.small else "jacobi-grid-divergent")
r = run_preset(name, args.out)
rep, ref = r["report"], r["refinement"]
print(f"{name}: direct {rep['direct_residual']:.6g}  closed form {rep['closed_form_residual']:.6g}")
print(f"  relative discrepancy {rep['relative_discrepancy']:.3e}")
for row in ref["rows"]:
    print(f"  n={row['points']:3d}  direct {row['direct']:.6g}  closed form {row['closed_form']:.6g}  "
          f"discrepancy {row['discrepancy']:.4e}")
print(f"  fitted order {ref['order']:.3f}")
