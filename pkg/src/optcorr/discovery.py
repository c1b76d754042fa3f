"""Monotone cones of optimized entropic correlation measures.

For ``E_alpha(rho_AB) = inf_{rho_ABV} sum_J alpha_J S_J`` there are two ways
to certify monotonicity under processing of A (and symmetrically B): the
objective itself decreases when a piece ``A2`` of ``A = A1 A2`` is discarded
(0-type), or when ``A2`` is moved into the extension system ``V`` (1-type).
Each certificate is a linear inequality in the 15 subset entropies of a
four-party state.  The alpha vectors for which the inequality follows from
strong subadditivity and weak monotonicity form a polyhedral cone in R^7,
computed here exactly.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .cones import RationalCone, canonicalize_ray, intersect, valid_on_cone
from .entropy_space import (
    ALPHA_SLOTS,
    AlphaVector,
    EntropyFunctional,
    PartySet,
    alpha_to_functional,
    cmi_functional,
    wm_functional,
)

PARTIES_A = PartySet(("A1", "A2", "B", "V"))
PARTIES_B = PartySet(("A", "B1", "B2", "V"))

# Normal of the finiteness halfspace: alpha_V + alpha_AV + alpha_BV + alpha_ABV >= 0.
FINITENESS_NORMAL = (0, 0, 1, 0, 1, 1, 1)

# Reference generator sets of the 00 and 10 cones, with and without the
# finiteness restriction (rows in slot order).
REFERENCE_RAYS = {
    "00": [
        (1, 1, 0, -1, 0, 0, 0),
        (1, 0, 0, 0, -1, 0, 0),
        (0, 0, 0, 0, 1, 1, -1),
        (0, 0, 0, 1, 0, 0, -1),
        (0, 1, 0, 0, 0, -1, 0),
        (0, 0, 1, 0, 0, 0, 0),
        (0, 0, -1, 0, 0, 0, 0),
    ],
    "10": [
        (1, 1, 0, -1, 0, 0, 0),
        (0, 0, -1, 0, 0, 1, -1),
        (1, 0, -1, 0, 0, 0, 0),
        (0, 1, 0, 0, 0, 0, -1),
        (1, 1, 0, 0, 0, -1, 0),
        (0, 0, -1, 1, 0, 0, -1),
        (0, 0, 0, 0, 1, 0, 0),
        (0, 0, 0, 0, -1, 0, 0),
    ],
}

REFERENCE_FINITE_RAYS = {
    "00": [
        (0, 0, 1, 0, 0, 0, 0),
        (1, 1, 0, -1, 0, 0, 0),
        (0, 0, -1, 0, 1, 1, -1),
        (0, 0, 1, 1, 0, 0, -1),
        (0, 1, 1, 0, 0, -1, 0),
        (1, 0, 1, 0, -1, 0, 0),
    ],
    "10": [
        (0, 0, 0, 0, 1, 0, 0),
        (1, 1, 0, -1, 0, 0, 0),
        (0, 0, -1, 0, 1, 1, -1),
        (1, 1, 0, 0, 1, -1, 0),
        (0, 0, -1, 1, 2, 0, -1),
        (0, 1, 0, 0, 1, 0, -1),
        (1, 0, -1, 0, 1, 0, 0),
    ],
}
# row tags 1..13 of the finite cones: the 00 block, then the 10 block
REFERENCE_FINITE_TAGS = {
    "00": list(range(1, 7)),
    "10": list(range(7, 14)),
}


class MonotonicityKind(enum.Enum):
    ZeroA = "0A"
    OneA = "1A"
    ZeroB = "0B"
    OneB = "1B"

    @property
    def party_set(self) -> PartySet:
        return PARTIES_A if self.value.endswith("A") else PARTIES_B

    def groupings(self) -> tuple:
        """(before, after) maps from A, B, V to parties of :attr:`party_set`."""
        if self in (MonotonicityKind.ZeroA, MonotonicityKind.OneA):
            pre = {"A": {"A1", "A2"}, "B": {"B"}, "V": {"V"}}
            post = {"A": {"A1"}, "B": {"B"},
                    "V": {"V"} if self is MonotonicityKind.ZeroA else {"A2", "V"}}
        else:
            pre = {"A": {"A"}, "B": {"B1", "B2"}, "V": {"V"}}
            post = {"A": {"A"}, "B": {"B1"},
                    "V": {"V"} if self is MonotonicityKind.ZeroB else {"B2", "V"}}
        return pre, post

    @classmethod
    def for_side(cls, side: str, bit: int) -> MonotonicityKind:
        return cls(f"{int(bit)}{side}")


@dataclass(frozen=True)
class MonotonicityMap:
    """Linear map alpha -> f^alpha(before) - f^alpha(after) into 4-party functionals."""

    kind: MonotonicityKind
    columns: tuple  # one EntropyFunctional per alpha slot

    def __call__(self, alpha) -> EntropyFunctional:
        out = EntropyFunctional.zero(self.kind.party_set)
        for a, col in zip(alpha, self.columns):
            if a != 0:
                out = out + col * Fraction(a)
        return out

    def pullback(self, h: Sequence) -> tuple:
        """Row vector ``r`` with ``r . alpha == M(alpha) . h``."""
        return tuple(col.evaluate(h) for col in self.columns)


@lru_cache(maxsize=None)
def monotonicity_map(kind: MonotonicityKind) -> MonotonicityMap:
    pre, post = kind.groupings()
    cols = []
    for slot in ALPHA_SLOTS:
        e = AlphaVector.unit(slot)
        cols.append(alpha_to_functional(e, pre, kind.party_set)
                    - alpha_to_functional(e, post, kind.party_set))
    return MonotonicityMap(kind, tuple(cols))


def _assignments(n: int, k: int):
    # every map of n parties into k labelled blocks plus "unused" (label k)
    return itertools.product(range(k + 1), repeat=n)


def ssa_instances(party_set: PartySet) -> list:
    """Every ``I(X:Y|Z) >= 0`` with X, Y nonempty, all three pairwise disjoint."""
    out = {}
    for assign in _assignments(party_set.n, 3):
        blocks = [tuple(p for p, a in zip(party_set.parties, assign) if a == b)
                  for b in range(3)]
        X, Y, Z = blocks
        if not X or not Y or party_set.index(X) > party_set.index(Y):
            continue
        f = cmi_functional(party_set, X, Y, Z)
        out[canonicalize_ray(f.coeffs)] = f
    return [out[k] for k in sorted(out)]


def wm_instances(party_set: PartySet) -> list:
    """Every ``S(C|X) + S(C|Y) >= 0`` with C, X, Y nonempty and pairwise disjoint."""
    out = {}
    for assign in _assignments(party_set.n, 3):
        C, X, Y = [tuple(p for p, a in zip(party_set.parties, assign) if a == b)
                   for b in range(3)]
        if not C or not X or not Y or party_set.index(X) > party_set.index(Y):
            continue
        f = wm_functional(party_set, C, X, Y)
        out[canonicalize_ray(f.coeffs)] = f
    return [out[k] for k in sorted(out)]


@lru_cache(maxsize=None)
def build_entropy_cone(n_parties: int = 4) -> RationalCone:
    """SSA + WM cone of entropy vectors on ``n_parties`` parties, generators cached.

    Vectors are positional (subset bitmask order), so the same cone serves
    both the ``(A1, A2, B, V)`` and ``(A, B1, B2, V)`` labellings.
    """
    ps = PartySet(tuple(f"P{k}" for k in range(n_parties)))
    rows = [f.coeffs for f in ssa_instances(ps) + wm_instances(ps)]
    cone = RationalCone(ps.size, rows)
    cone.generators()
    return cone


def finiteness_check(alpha) -> bool:
    """False when ``f^alpha`` is unbounded below on ``rho_AB (x) I_k/k``."""
    return sum(a * n for a, n in zip(alpha, FINITENESS_NORMAL)) >= 0


def finiteness_halfspace() -> RationalCone:
    return RationalCone(7, [FINITENESS_NORMAL])


def dual_alpha(alpha):
    """Coefficients of the same objective on the complementary extension W.

    Purifying ``rho_ABV`` to ``ABVW`` and keeping ``ABW`` swaps the roles
    AV <-> BV and V <-> ABV; A, B, AB are unchanged.
    """
    a = list(alpha)
    beta = [a[0], a[1], a[6], a[3], a[5], a[4], a[2]]
    return AlphaVector(tuple(beta)) if isinstance(alpha, AlphaVector) else tuple(beta)


def kind_cone(kind: MonotonicityKind) -> RationalCone:
    """All alpha whose certificate inequality for ``kind`` holds on the entropy cone."""
    ent = build_entropy_cone()
    M = monotonicity_map(kind)
    rows = [M.pullback(h) for h in ent.rays]
    # the entropy cone is pointed, but keep the general form
    for v in ent.lineality:
        rows.append(M.pullback(v))
        rows.append(tuple(-x for x in M.pullback(v)))
    return RationalCone(7, rows)


@dataclass
class DiscoveryResult:
    cone_label: str
    finite: bool
    cone: RationalCone
    rays: list  # canonical integer tuples: extreme rays plus +/- lineality
    classifications: list = field(default_factory=list)

    @property
    def label(self) -> str:
        return ("C∩" if self.finite else "") + self.cone_label

    def alpha_vectors(self) -> list:
        return [AlphaVector.exact(r) for r in self.rays]

    def matches(self, expected: Sequence) -> bool:
        return set(map(tuple, self.rays)) == set(map(tuple, expected))

    def diff(self, expected: Sequence) -> tuple:
        got, want = set(map(tuple, self.rays)), set(map(tuple, expected))
        return sorted(got - want), sorted(want - got)


def alpha_cone(first: int, second: int, restrict_finite: bool = False) -> DiscoveryResult:
    """Cone of alpha that are ``first``-monotone on A and ``second``-monotone on B."""
    ka = MonotonicityKind.for_side("A", first)
    kb = MonotonicityKind.for_side("B", second)
    cone = intersect(kind_cone(ka), kind_cone(kb))
    if restrict_finite:
        cone = intersect(cone, finiteness_halfspace())
    rays = list(cone.generator_rows())
    # re-verify every generator against both certificates, independently of the
    # generator enumeration that produced them
    ent = build_entropy_cone()
    for r in rays:
        for k in (ka, kb):
            if not valid_on_cone(monotonicity_map(k)(r).coeffs, ent):
                raise AssertionError(f"ray {r} fails the {k.value} certificate")
    return DiscoveryResult(f"{first}{second}", restrict_finite, cone, rays)


def expected_rays(label: str, finite: bool) -> list:
    """Published generator sets; the 01 and 11 cones follow by duality."""
    table = REFERENCE_FINITE_RAYS if finite else REFERENCE_RAYS
    if label in table:
        return list(table[label])
    source = {"01": "10", "11": "00"}[label]
    return [canonicalize_ray(dual_alpha(r)) for r in table[source]]


NAMED_ALPHAS = {
    "P": (0, 0, 0, 0, 1, 0, 0),
    "Q": (0.5, 0.5, 0, 0, 0.5, -0.5, 0),
    "R": (0, 0, -0.5, 0.5, 1, 0, -0.5),
    "sq": (0, 0, -1, 0, 1, 1, -1),
}


def named_alpha(name: str) -> AlphaVector:
    """Float alpha vectors of E_P, E_Q, E_R and the squashed-entanglement objective."""
    try:
        return AlphaVector.real(NAMED_ALPHAS[name])
    except KeyError:
        raise KeyError(f"unknown measure {name!r}; expected one of "
                       f"{sorted(NAMED_ALPHAS)}") from None


# ---------------------------------------------------------------- numeric side

def rebuild_extension(kind: MonotonicityKind, rho4):
    """The two tripartite readings of a four-party state behind a certificate.

    ``rho4`` lives on the parties of ``kind.party_set``.  Returns
    ``(before, after)``: the state read as an extension of the unprocessed
    pair, and the extension of the processed pair that the certificate builds
    from it (discarding the piece for 0-kinds, moving it into V for 1-kinds).
    ``f(before) - f(after)`` equals ``monotonicity_map(kind)(alpha)`` evaluated
    on the entropy vector of ``rho4``.
    """
    from .states import merge, partial_trace, permute, relabel

    if tuple(rho4.labels) != kind.party_set.parties:
        raise KeyError(f"expected parties {kind.party_set.parties}, got {rho4.labels}")
    if kind in (MonotonicityKind.ZeroA, MonotonicityKind.OneA):
        before = merge(rho4, ["A1", "A2"], "A")
        if kind is MonotonicityKind.ZeroA:
            after = relabel(partial_trace(rho4, ["A1", "B", "V"]), {"A1": "A"})
        else:
            after = merge(permute(rho4, ["A1", "B", "A2", "V"]), ["A2", "V"], "V")
            after = relabel(after, {"A1": "A"})
    else:
        before = merge(rho4, ["B1", "B2"], "B")
        if kind is MonotonicityKind.ZeroB:
            after = relabel(partial_trace(rho4, ["A", "B1", "V"]), {"B1": "B"})
        else:
            after = relabel(merge(rho4, ["B2", "V"], "V"), {"B1": "B"})
    return before, after


def divergence_profile(alpha, rho_AB, ks=(2, 4, 8)) -> list:
    """``f^alpha(rho_AB (x) I_k / k)`` for each ``k``."""
    from .states import f_alpha, maximally_mixed, tensor

    return [f_alpha(alpha, tensor(rho_AB, maximally_mixed("V", k))) for k in ks]


def default_classification_samples() -> list:
    from .states import bell_state, classical_state, random_density_matrix

    return [bell_state(), classical_state([0.7, 0.3]),
            random_density_matrix({"A": 2, "B": 2}, seed=101),
            random_density_matrix({"A": 2, "B": 2}, seed=202)]


def classify_ray(alpha, samples: Sequence | None = None, eps: float = 1e-3,
                 d_V: int | None = None, restarts: int = 2, max_iters: int = 300,
                 seed: int = 0) -> str:
    """Heuristic tag for an extreme ray: ``zero``, ``mutual-information`` or ``nontrivial`` candidate.

    Runs a short estimator pass on each sample; the tag is a hint, never a proof.
    """
    from .estimator import estimate_measure
    from .states import mutual_information

    if not finiteness_check(alpha):
        raise ValueError(f"{tuple(alpha)} violates the finiteness condition")
    samples = samples if samples is not None else default_classification_samples()
    alpha = AlphaVector.real(alpha)
    values, infos = [], []
    for rho in samples:
        est = estimate_measure(alpha, rho, d_V=d_V, restarts=restarts,
                               max_iters=max_iters, seed=seed)
        values.append(est.value)
        infos.append(mutual_information(rho))
    if all(abs(v) <= eps for v in values):
        return "zero-candidate"
    if all(abs(v - i) <= eps for v, i in zip(values, infos)):
        return "mutual-information-candidate"
    return "nontrivial-candidate"
