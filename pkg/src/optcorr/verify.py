"""Property suites: table reproduction, bounds, closed forms, additivity,
monotonicity, pointwise domination, duality, divergence and numerical hygiene.

Each check returns :class:`Check` records with the measured margin; a
negative ``slack`` means the bound was violated.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .cones import canonicalize_ray
from .discovery import (
    MonotonicityKind,
    alpha_cone,
    build_entropy_cone,
    divergence_profile,
    dual_alpha,
    expected_rays,
    monotonicity_map,
    named_alpha,
)
from .entropy_space import AlphaVector
from .estimator import (
    InfiniteMeasureError,
    Objective,
    estimate_measure,
    estimate_product,
    extension_from_ansatz,
    purify,
    random_ansatz,
)
from .states import (
    DensityMatrix,
    antisymmetric_state,
    bell_state,
    classical_state,
    entropy_vectors,
    f_alpha,
    partial_trace,
    product_state,
    pure_random_state,
    random_density_matrices,
    random_density_matrix,
    relabel,
)

# floating-point roundoff allowance at closed interval endpoints
ROUNDOFF = 1e-9


@dataclass
class Check:
    name: str
    passed: bool
    slack: float | None = None
    detail: str = ""

    def line(self) -> str:
        s = "" if self.slack is None else f" (slack {self.slack:+.3g})"
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail}{s}"

    def to_json(self) -> dict:
        return asdict(self)


def _interval(name, values, lo, hi, fmt="{:.6f}") -> Check:
    values = list(values)
    slack = min(min(v - lo, hi - v) for v in values)
    shown = ", ".join(fmt.format(v) for v in values)
    return Check(name, slack >= -ROUNDOFF, slack, f"[{shown}] within [{lo}, {hi}]")


def _at_most(name, values, bound, fmt="{:.3g}") -> Check:
    values = list(values)
    slack = bound - max(values)
    return Check(name, slack >= 0, slack,
                 f"max {fmt.format(max(values))} <= {bound:g} over {len(values)} cases")


# ---------------------------------------------------------------- tables

def check_tables() -> list:
    out = []
    for finite, counts in ((False, {"00": 7, "10": 8}), (True, {"00": 6, "10": 7})):
        for label, n in counts.items():
            res = alpha_cone(int(label[0]), int(label[1]), finite)
            extra, missing = res.diff(expected_rays(label, finite))
            ok = not extra and not missing and len(res.rays) == n
            table = "finite cone" if finite else "cone"
            out.append(Check(f"reference {table} {res.label}", ok, None,
                             f"{len(res.rays)} rays (expected {n}); extra {extra}, missing {missing}"))
    return out


def check_duality_closure() -> list:
    out = []
    for finite in (False, True):
        for direct, source in (("01", "10"), ("11", "00")):
            d = alpha_cone(int(direct[0]), int(direct[1]), finite)
            s = alpha_cone(int(source[0]), int(source[1]), finite)
            image = {canonicalize_ray(dual_alpha(r)) for r in s.rays}
            ok = set(d.rays) == image
            out.append(Check(f"duality {d.label} = dual({s.label})", ok, None,
                             f"{len(d.rays)} direct rays vs {len(image)} dual images"))
    return out


# ---------------------------------------------------------------- estimates

def check_bell_sandwich(seed=0, restarts=8) -> list:
    out = []
    for m in "PQR":
        est = estimate_measure(named_alpha(m), bell_state(), d_V=4, restarts=restarts, seed=seed)
        c = _interval(f"Bell E_{m}", [est.value], 1.000, 1.001)
        lb_ok = est.lower_bound is not None and abs(est.lower_bound - 1.0) <= ROUNDOFF
        c.passed &= lb_ok
        c.detail += f", lower bound {est.lower_bound:.6f}"
        out.append(c)
    return out


def check_classical(seed=0, restarts=8) -> list:
    half = classical_state([0.5, 0.5])
    quarter = classical_state([0.25] * 4)
    out = []
    est = {m: estimate_measure(named_alpha(m), half, restarts=restarts, seed=seed) for m in "PQR"}
    out.append(_interval("classical(1/2,1/2) E_R", [est["R"].value], 0.500, 0.505))
    out.append(_interval("classical(1/2,1/2) E_P, E_Q", [est["P"].value, est["Q"].value],
                         1.000, 1.005))
    q = estimate_measure(named_alpha("Q"), quarter, d_V=4, restarts=restarts, seed=seed)
    out.append(_interval("classical(1/4 x4) E_Q", [q.value], 2.000, 2.01))
    return out


def check_pure_closure(seed=0, n=10, restarts=8) -> list:
    out = []
    states = [pure_random_state(2, seed=np.random.default_rng([seed, 6, k])) for k in range(n)]
    for m in "PQR":
        devs = []
        for rho in states:
            s_a = partial_trace(rho, ["A"]).entropy()
            est = estimate_measure(named_alpha(m), rho, restarts=restarts, seed=seed)
            devs.append(abs(est.value - s_a))
        out.append(_at_most(f"pure states |E_{m} - S_A|", devs, 5e-3))
    return out


def random_mixed_product(seed) -> DensityMatrix:
    rng = np.random.default_rng(seed)
    return product_state(random_density_matrix({"X": 2}, rng), random_density_matrix({"X": 2}, rng))


def check_product_nullity(seed=0, n=5, restarts=8) -> list:
    out = []
    states = [random_mixed_product([seed, 7, k]) for k in range(n)]
    for m in "PQR":
        vals, bounds = [], []
        for rho in states:
            est = estimate_measure(named_alpha(m), rho, restarts=restarts, seed=seed)
            vals.append(est.value)
            bounds.append(est.lower_bound)
        c = _at_most(f"products E_{m}", vals, 5e-3)
        lb_ok = all(b is not None and abs(b) <= ROUNDOFF for b in bounds)
        c.passed &= lb_ok
        c.detail += f", certified lower bounds {'all 0' if lb_ok else bounds}"
        out.append(c)
    return out


def check_antisymmetric(seed=0, restarts=8) -> list:
    rho = antisymmetric_state(3)
    out = []
    q = estimate_measure(named_alpha("Q"), rho, d_V=3, restarts=restarts, seed=seed)
    out.append(_interval("antisym(3) E_Q", [q.value], math.log2(3) - 5e-3, math.log2(3) + 5e-3))
    r = estimate_measure(named_alpha("R"), rho, d_V=3, restarts=restarts, seed=seed)
    sq = estimate_measure(named_alpha("sq"), rho, d_V=3, restarts=restarts, seed=seed)
    # f^R = (S_AB + I(A:B|V)) / 2 on this family; sq estimates inf I(A:B|V)
    target = 0.5 * math.log2(3) + 0.5 * sq.value
    dev = abs(r.value - target)
    out.append(Check("antisym(3) E_R vs S_AB/2 + E_sq", dev <= 1e-2, 1e-2 - dev,
                     f"E_R {r.value:.6f}, target {target:.6f} (inf I(A:B|V) {sq.value:.6f})"))
    out.append(check_swap_symmetry(seed))
    return out


def check_swap_symmetry(seed=0, n=50) -> Check:
    worst = 0.0
    rng = np.random.default_rng([seed, 8])
    for d in (2, 3):
        rho = antisymmetric_state(d)
        pur = purify(rho)
        for _ in range(n):
            d_V = int(rng.integers(1, 5))
            ext = extension_from_ansatz(rho, random_ansatz(pur.d_E, d_V, seed=rng), pur)
            s_av = partial_trace(ext, ["A", "V"]).entropy()
            s_bv = partial_trace(ext, ["B", "V"]).entropy()
            worst = max(worst, abs(s_av - s_bv))
    return Check("antisym(2,3) extensions S_AV = S_BV", worst <= 1e-9, 1e-9 - worst,
                 f"max |S_AV - S_BV| {worst:.3g} over {2 * n} extensions")


def check_sandwich(seed=0, n=3, restarts=4) -> list:
    out = []
    states = [random_density_matrix({"A": 2, "B": 2}, [seed, 9, k]) for k in range(n)]
    for m in "PQR":
        slack = math.inf
        for rho in states:
            est = estimate_measure(named_alpha(m), rho, restarts=restarts, seed=seed)
            upper = min(partial_trace(rho, ["A"]).entropy(), partial_trace(rho, ["B"]).entropy())
            slack = min(slack, est.value - est.lower_bound + ROUNDOFF, upper + 1e-3 - est.value)
        out.append(Check(f"I/2 <= E_{m} <= min(S_A, S_B)", slack >= 0, slack,
                         f"{n} random two-qubit states"))
    return out


def check_additivity(seed=0, restarts=4) -> list:
    out = []
    c = classical_state([0.5, 0.5])
    joint, _, _ = estimate_product(named_alpha("R"), c, c, d_V1=2, d_V2=2,
                                   restarts=restarts, seed=seed)
    out.append(_interval("E_R classical (x) classical", [joint.value], 1.00, 1.01))
    rng = np.random.default_rng([seed, 10])
    p1, p2 = pure_random_state(2, rng), pure_random_state(2, rng)
    joint, _, _ = estimate_product(named_alpha("Q"), p1, p2, restarts=restarts, seed=seed)
    target = partial_trace(p1, ["A"]).entropy() + partial_trace(p2, ["A"]).entropy()
    dev = abs(joint.value - target)
    out.append(Check("E_Q pure (x) pure = S_A1 + S_A2", dev <= 1e-2, 1e-2 - dev,
                     f"estimate {joint.value:.6f}, S_A1 + S_A2 {target:.6f}"))
    return out


def check_monotonicity(seed=0, trials=20, d_V=4, restarts=2, max_iters=1000) -> list:
    out = []
    worst = {m: math.inf for m in "QR"}
    for k in range(trials):
        rho3 = random_density_matrix({"A": 2, "B1": 2, "B2": 2}, [seed, 11, k])
        unprocessed = DensityMatrix({"A": 2, "B": 4}, rho3.matrix, validate=False)
        processed = relabel(partial_trace(rho3, ["A", "B1"]), {"B1": "B"})
        for m in "QR":
            kw = dict(d_V=d_V, restarts=restarts, max_iters=max_iters, seed=seed)
            after = estimate_measure(named_alpha(m), processed, **kw).value
            before = estimate_measure(named_alpha(m), unprocessed, **kw).value
            worst[m] = min(worst[m], before + 1e-2 - after)
    for m in "QR":
        out.append(Check(f"E_{m} monotone under tracing out B2", worst[m] >= 0, worst[m],
                         f"{trials} random qubit x (qubit x qubit) states, d_V={d_V}"))
    return out


def check_domination(seed=0, n=100) -> list:
    rng = np.random.default_rng([seed, 12])
    worst_q = worst_r = -math.inf
    P, Q, R = (named_alpha(m) for m in "PQR")
    for _ in range(n):
        d_A, d_B = (int(x) for x in rng.integers(2, 4, size=2))
        rho = random_density_matrix({"A": d_A, "B": d_B}, rng, rank=int(rng.integers(1, d_A * d_B + 1)))
        pur = purify(rho)
        ext = extension_from_ansatz(rho, random_ansatz(pur.d_E, int(rng.integers(1, 5)), seed=rng), pur)
        fp = f_alpha(P, ext)
        worst_q = max(worst_q, f_alpha(Q, ext) - fp)
        worst_r = max(worst_r, f_alpha(R, ext) - fp)
    return [
        Check("f^Q <= f^P pointwise", worst_q <= 1e-9, 1e-9 - worst_q,
              f"max f^Q - f^P {worst_q:.3g} over {n} extensions"),
        Check("f^R <= f^P pointwise", worst_r <= 1e-9, 1e-9 - worst_r,
              f"max f^R - f^P {worst_r:.3g} over {n} extensions"),
    ]


def check_duality_estimates(seed=0, n=2, restarts=4) -> list:
    out = []
    states = [random_density_matrix({"A": 2, "B": 2}, [seed, 13, k]) for k in range(n)]
    for m in "PQR":
        a = named_alpha(m)
        devs = []
        for rho in states:
            e1 = estimate_measure(a, rho, restarts=restarts, seed=seed).value
            e2 = estimate_measure(dual_alpha(a), rho, restarts=restarts, seed=seed).value
            devs.append(abs(e1 - e2))
        out.append(_at_most(f"E_{m} = E_dual({m})", devs, 2e-3))
    return out


def check_divergence(seed=0) -> list:
    alpha = AlphaVector.real([0, 0, -1, 0, 0, 0, 0])
    rho = random_density_matrix({"A": 2, "B": 2}, [seed, 14])
    vals = divergence_profile(alpha, rho, (2, 4, 8))
    dec = all(b < a for a, b in zip(vals, vals[1:]))
    out = [Check("f^{-e_V} on rho (x) I_k/k decreases, k = 2, 4, 8", dec, None,
                 ", ".join(f"{v:.6f}" for v in vals))]
    try:
        estimate_measure(alpha, rho, restarts=1)
        out.append(Check("estimator rejects -e_V", False, None, "no error raised"))
    except InfiniteMeasureError as exc:
        out.append(Check("estimator rejects -e_V", True, None, f"InfiniteMeasureError: {exc}"))
    return out


def gradient_check(seed=0, points=20, step=1e-5) -> float:
    """Worst relative error of the analytic directional derivative against central differences."""
    rng = np.random.default_rng([seed, 15])
    worst = 0.0
    for _ in range(points):
        d_A, d_B = (int(x) for x in rng.integers(2, 4, size=2))
        rho = random_density_matrix({"A": d_A, "B": d_B}, rng)
        pur = purify(rho)
        d_V = int(rng.integers(1, 4))
        d_F = d_V * pur.d_E
        alpha = rng.normal(size=7)
        obj = Objective(alpha, pur, d_V, d_F)
        W = random_ansatz(pur.d_E, d_V, d_F, seed=rng).W
        _, G = obj.value_and_grad(W)
        D = rng.normal(size=W.shape) + 1j * rng.normal(size=W.shape)
        D /= np.linalg.norm(D)
        fd = (obj.value_and_grad(W + step * D)[0] - obj.value_and_grad(W - step * D)[0]) / (2 * step)
        an = float(np.vdot(G, D).real)
        worst = max(worst, abs(fd - an) / max(abs(an), 1e-12))
    return worst


def ssa_wm_violation(seed=0, n=10_000) -> float:
    """Most negative SSA/WM instance over ``n`` random four-qubit states."""
    ent = build_entropy_cone()
    H = np.array([[float(x) for x in c] for c in ent.inequalities])
    mats = random_density_matrices(n, 16, seed=np.random.default_rng([seed, 16]),
                                   ranks=[1, 2, 4, 16])
    h = entropy_vectors(mats, (2, 2, 2, 2))
    return float((h @ H.T).min())


def check_hygiene(seed=0) -> list:
    g = gradient_check(seed)
    v = ssa_wm_violation(seed)
    return [
        Check("analytic gradient vs central differences", g <= 1e-4, 1e-4 - g,
              f"worst relative error {g:.3g} at 20 points"),
        Check("SSA/WM on 10^4 random 4-party states", v >= -1e-9, v + 1e-9,
              f"min instance value {v:.3g}"),
    ]


def check_rays_vs_states(seed=0, n=10_000) -> list:
    """Every discovered ray's certificates are nonnegative on random four-party states."""
    mats = random_density_matrices(n, 16, seed=np.random.default_rng([seed, 17]),
                                   ranks=[1, 2, 4, 16])
    h = entropy_vectors(mats, (2, 2, 2, 2))
    worst = math.inf
    for a in (0, 1):
        for b in (0, 1):
            res = alpha_cone(a, b, False)
            for kind in (MonotonicityKind.for_side("A", a), MonotonicityKind.for_side("B", b)):
                M = monotonicity_map(kind)
                for r in res.rays:
                    c = np.array([float(x) for x in M(r).coeffs])
                    worst = min(worst, float((h @ c).min()))
    return [Check("discovered rays never contradicted by states", worst >= -1e-9, worst + 1e-9,
                  f"min certificate value {worst:.3g} on {n} states")]


SUITES = {
    "tables": [check_tables, check_duality_closure],
    "bounds": [check_bell_sandwich, check_product_nullity, check_sandwich],
    "closed-forms": [check_classical, check_pure_closure, check_antisymmetric],
    "additivity": [check_additivity],
    "monotonicity": [check_monotonicity, check_rays_vs_states],
    "domination": [check_domination],
    "duality": [check_duality_closure, check_duality_estimates],
    "divergence": [check_divergence],
    "hygiene": [check_hygiene],
}


def run_suite(name: str, seed: int = 0) -> list:
    names = list(SUITES) if name == "all" else [name]
    if any(n not in SUITES for n in names):
        raise KeyError(f"unknown suite {name!r}; expected one of {sorted(SUITES)} or 'all'")
    seen, checks = set(), []
    for n in names:
        for fn in SUITES[n]:
            if fn in seen:
                continue
            seen.add(fn)
            res = fn() if fn in (check_tables, check_duality_closure) else fn(seed=seed)
            checks.extend(res if isinstance(res, list) else [res])
    return checks
