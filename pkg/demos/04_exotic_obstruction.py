"""The exotic RIM condition on a 2-D slice: curl, potentials and a witness.

Run:  python demos/04_exotic_obstruction.py
"""

import numpy as np

from rimspinor.exotic import GridSpec, lemma2_demo, witness_convergence

for spec in ("zero", "linear:0.1"):
    out = lemma2_demo(spec, (64, 64), refinements=1)
    r0, r1 = out["exotic"]["reports"]
    print(f"theta = {spec}")
    print(f"  max curl J      {r0['max_curl_J']:.3e} -> {r1['max_curl_J']:.3e} after halving h")
    print(f"  demanded curl   {r0['required_curl_J']:.3e}")
    print(f"  path mismatch   {r0['path_discrepancy']:.3e}")
    print(f"  S * d theta     {r0['potential_conflict']:.3e}")

# the exotic Dirac equation itself has plane-wave solutions damped by exp(-theta)
res = witness_convergence([np.sqrt(1.45), 0.6, 0.3, 0.0], 1.0, [0, 0.1, 0, 0], GridSpec((64, 64), 1 / 64), 3)
print("witness r1:", ["%.2e" % r for r in res["r1"]], "orders", np.round(res["order_r1"], 2))
print("witness r2:", ["%.2e" % r for r in res["r2"]], "orders", np.round(res["order_r2"], 2))
