"""Additivity on products and monotonicity under discarding a subsystem.

Run:  python3 demos/04_products_and_monotonicity.py
"""
from optcorr.discovery import divergence_profile, named_alpha
from optcorr.estimator import estimate_product, estimate_measure
from optcorr.states import (
    DensityMatrix,
    bell_state,
    classical_state,
    partial_trace,
    pure_random_state,
    random_density_matrix,
    relabel,
)

c = classical_state([0.5, 0.5])
joint, e1, e2 = estimate_product(named_alpha("R"), c, c, restarts=2)
print(f"E_R(c (x) c) <= {joint.value:.6f}, E_R(c) + E_R(c) <= {e1.value + e2.value:.6f}")

p1, p2 = pure_random_state(2, seed=4), pure_random_state(2, seed=5)
joint, _, _ = estimate_product(named_alpha("Q"), p1, p2, restarts=2)
s = partial_trace(p1, "A").entropy() + partial_trace(p2, "A").entropy()
print(f"E_Q on two pure states: {joint.value:.6f} vs S_A1 + S_A2 = {s:.6f}")

# trace out B2 from a qubit x (qubit x qubit) state
rho3 = random_density_matrix({"A": 2, "B1": 2, "B2": 2}, seed=9)
full = DensityMatrix({"A": 2, "B": 4}, rho3.matrix)
cut = relabel(partial_trace(rho3, ["A", "B1"]), {"B1": "B"})
for m in "QR":
    before = estimate_measure(named_alpha(m), full, d_V=4, restarts=2).value
    after = estimate_measure(named_alpha(m), cut, d_V=4, restarts=2).value
    print(f"E_{m}: {before:.4f} before discarding B2, {after:.4f} after")

# an objective with negative weight on V runs off to minus infinity
print("\nf^(-e_V) on rho (x) I_k/k, k = 2, 4, 8:",
      [round(v, 4) for v in divergence_profile([0, 0, -1, 0, 0, 0, 0], bell_state())])
