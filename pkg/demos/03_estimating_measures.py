"""Upper bounds on E_P, E_Q, E_R by optimizing over extensions.

Every estimate is an infimum over a restricted family, so it bounds the
measure from above; the half mutual information bounds it from below.

Run:  python3 demos/03_estimating_measures.py
"""
import math

from optcorr.discovery import named_alpha
from optcorr.estimator import estimate_measure
from optcorr.states import antisymmetric_state, bell_state, classical_state, partial_trace, random_density_matrix

states = {
    "bell": bell_state(),
    "classical(1/2,1/2)": classical_state([0.5, 0.5]),
    "random 2x2": random_density_matrix({"A": 2, "B": 2}, seed=1),
}
for name, rho in states.items():
    s_a = partial_trace(rho, "A").entropy()
    print(f"\n{name}:  S_A = {s_a:.4f}")
    for m in "PQR":
        est = estimate_measure(named_alpha(m), rho, restarts=4)
        print(f"   E_{m} <= {est.value:.6f}   (>= {est.lower_bound:.6f}, gap {est.gap:.2e})")

# antisymmetric qutrit state: E_Q is log2(3)
rho = antisymmetric_state(3)
q = estimate_measure(named_alpha("Q"), rho, d_V=3, restarts=4)
print(f"\nantisymmetric qutrits: E_Q <= {q.value:.6f}, log2 3 = {math.log2(3):.6f}")

# the witness is a replayable extension
print("\nwitness isometry error:", f"{q.witness.isometry_error():.1e}")
