"""Casimir and energy drift under RK4 with dt halving."""

import argparse

from _common import run_preset

p = argparse.ArgumentParser(description=__doc__)
p.add_argument("--out", default=None)
args = p.parse_args()

for name in ("casimir-vlasov-maxwell", "casimir-monopole"):
    r = run_preset(name, args.out and f"{args.out}/{name}")
    print(name)
    for q in ("C_E", "C_B", "C_B_sourced", "energy"):
        if q in r:
            drift = ", ".join(f"{d:.2e}" for d in r[q]["drift"])
            order = r[q]["order"]
            order = f"{order:.2f}" if isinstance(order, float) else str(order)
            print(f"  {q:12s} drift [{drift}]  order {order}")
