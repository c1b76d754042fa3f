"""Discovering which 7-coefficient objectives are monotone.

Each cone collects the alpha whose monotonicity certificate is valid on the
entropy cone; the finite variants drop objectives that go to minus infinity.

Run:  python3 demos/02_monotone_cones.py
"""
from optcorr.discovery import alpha_cone, dual_alpha, expected_rays, named_alpha
from optcorr.entropy_space import ALPHA_SLOTS

print("slots:", "  ".join(ALPHA_SLOTS))
for finite in (False, True):
    for label in ("00", "10"):
        res = alpha_cone(int(label[0]), int(label[1]), finite)
        ok = res.matches(expected_rays(label, finite))
        print(f"\ncone {res.label}: {len(res.rays)} generators, reference match {ok}")
        for r in res.rays:
            print("   ", " ".join(f"{x:>3d}" for x in r))

# the 01 cone is the image of 10 under the A/B-preserving duality
c10 = alpha_cone(1, 0, True)
c01 = alpha_cone(0, 1, True)
images = sorted(tuple(dual_alpha(r)) for r in c10.rays)
print("\ndual(C∩10) == C∩01:", images == sorted(c01.rays))

# where the named objectives sit
for m in ("P", "Q", "R", "sq"):
    a = named_alpha(m).to_exact()
    print(f"E_{m:<2} in C∩10: {c10.cone.contains(a)}")
