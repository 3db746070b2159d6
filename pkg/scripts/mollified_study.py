"""Mollified point-particle study: residual coefficient as the widths shrink."""

import argparse

from _common import run_preset

p = argparse.ArgumentParser(description=__doc__)
p.add_argument("--out", default=None)
args = p.parse_args()

m = run_preset("mollified-delta", args.out)["mollified"]
print(f"{'sigma':>8s} {'C(sigma)':>12s} {'rel. discrepancy':>18s}")
for row in m["rows"]:
    print(f"{row['sigma']:8.3f} {row['C_sigma']:12.5f} {row['relative_discrepancy']:18.2e}")
print(f"extrapolated coefficient  {m['extrapolated_coefficient']:.4f}")
print(f"4 pi e g / (m^3 c)        {m['derived_coefficient_4pi_eg_over_m3c']:.4f}")
print(f"12 pi e g / c             {m['printed_coefficient_12pi_eg_over_c']:.4f}")
