"""The 4-party entropy cone used as the certificate domain.

Run:  python3 demos/01_entropy_cone.py
"""
import numpy as np

from optcorr.discovery import PARTIES_A, build_entropy_cone, ssa_instances, wm_instances
from optcorr.states import entropy_vectors, random_density_matrices

# SSA and weak monotonicity over every choice of disjoint subsets
ssa = ssa_instances(PARTIES_A)
wm = wm_instances(PARTIES_A)
print(f"{len(ssa)} SSA instances, {len(wm)} WM instances")
print("one of each:")
print("  ", ssa[0])
print("  ", wm[0])

# double description, exact integers
cone = build_entropy_cone()
print(f"\n{len(cone.inequalities)} distinct inequalities in dimension {cone.ambient_dim}")
print(f"{len(cone.rays)} extreme rays, pointed: {cone.is_pointed()}")
for r in cone.rays[:5]:
    print("  ", r)
print("   ...")

# random states land inside the cone
mats = random_density_matrices(2000, 16, seed=0)
h = entropy_vectors(mats, (2, 2, 2, 2))
rows = np.array(cone.inequalities, dtype=float)
worst = (h @ rows.T).min()
print(f"\nsmallest inequality value over 2000 random 4-qubit states: {worst:.2e}")
