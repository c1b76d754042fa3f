"""Exact polyhedral cones ``{x : c.x >= 0 for every stored c}``.

All arithmetic is on Python integers and Fractions.  Generators are computed
with the double description method: the lineality space is split off first,
then the pointed remainder is built by inserting one inequality at a time and
combining adjacent ray pairs (combinatorial adjacency test).
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence


class IterationLimitError(RuntimeError):
    """The double description run exceeded its intermediate ray budget."""


DEFAULT_MAX_RAYS = 200_000


def canonicalize_ray(v: Sequence) -> tuple:
    """Scale ``v`` by a positive rational to a primitive integer vector."""
    fracs = [Fraction(x) for x in v]
    if all(x == 0 for x in fracs):
        raise ValueError("cannot canonicalize the zero vector")
    den = math.lcm(*(x.denominator for x in fracs))
    ints = [int(x * den) for x in fracs]
    g = math.gcd(*ints)
    return tuple(i // g for i in ints)


def _canonical_line(v: Sequence) -> tuple:
    # lines have no orientation: first nonzero entry positive
    r = canonicalize_ray(v)
    lead = next(x for x in r if x != 0)
    return r if lead > 0 else tuple(-x for x in r)


def _dot(a: Sequence, b: Sequence):
    return sum(x * y for x, y in zip(a, b))


def _rref(rows: Sequence[Sequence], d: int):
    """Reduced row echelon form over Q; returns (rows, pivot columns)."""
    m = [[Fraction(x) for x in r] for r in rows]
    pivots = []
    r = 0
    for col in range(d):
        piv = next((i for i in range(r, len(m)) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][col]
        m[r] = [x / p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col] != 0:
                f = m[i][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Sequence[Sequence], d: int | None = None) -> int:
    rows = list(rows)
    if not rows:
        return 0
    return len(_rref(rows, d if d is not None else len(rows[0]))[1])


def nullspace(rows: Sequence[Sequence], d: int) -> list:
    """Basis of ``{x : r.x = 0 for r in rows}`` as canonical integer lines."""
    red, pivots = _rref(rows, d) if rows else ([], [])
    free = [c for c in range(d) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * d
        v[f] = Fraction(1)
        for row, pc in zip(red, pivots):
            v[pc] = -row[f]
        basis.append(_canonical_line(v))
    return basis


def _insertion_order(rows: list) -> list:
    # most zero entries first, ties broken by the canonical (sorted) position
    return sorted(range(len(rows)), key=lambda i: (-sum(1 for x in rows[i] if x == 0), i))


def _primitive(v: list) -> list:
    g = math.gcd(*v)
    return [x // g for x in v] if g > 1 else v


def _double_description(rows: list, d: int, n_eq: int, max_rays: int) -> list:
    """Extreme rays of the pointed cone ``{x : rows[i].x >= 0}``.

    The first ``n_eq`` rows are the +/- pairs pinning the lineality space;
    they go into the initial basis first.
    """
    order = list(range(n_eq)) + [n_eq + i for i in _insertion_order(rows[n_eq:])]
    # initial basis: greedily pick d independent rows in insertion order
    basis = []
    for i in order:
        if rank([rows[j] for j in basis] + [rows[i]], d) > len(basis):
            basis.append(i)
            if len(basis) == d:
                break
    if len(basis) < d:
        raise ValueError("cone is not pointed after removing its lineality space")
    B = [[Fraction(x) for x in rows[i]] for i in basis]
    # columns of B^{-1}: solve B X = I
    aug = [B[i] + [Fraction(int(i == j)) for j in range(d)] for i in range(d)]
    red, _ = _rref(aug, 2 * d)
    inv_cols = [[red[i][d + j] for i in range(d)] for j in range(d)]

    processed = list(basis)
    pos = {row: k for k, row in enumerate(processed)}
    rays = []  # (integer vector, zero-set bitmask over processed positions)
    full = (1 << d) - 1
    for j in range(d):
        rays.append((list(canonicalize_ray(inv_cols[j])), full & ~(1 << j)))

    for i in order:
        if i in pos:
            continue
        a = rows[i]
        k = len(processed)
        processed.append(i)
        pos[i] = k
        bit = 1 << k
        plus, zero, minus = [], [], []
        for r, z in rays:
            s = _dot(a, r)
            if s > 0:
                plus.append((r, z, s))
            elif s < 0:
                minus.append((r, z, s))
            else:
                zero.append((r, z | bit))
        if not minus:
            rays = [(r, z) for r, z, _ in plus] + zero
            continue
        zsets = [z for _, z in rays]
        new = []
        for rp, zp, sp in plus:
            for rn, zn, sn in minus:
                common = zp & zn
                if common.bit_count() < d - 2:
                    continue
                # adjacent iff no third ray is tight on all of `common`
                hits = 0
                for z in zsets:
                    if z & common == common:
                        hits += 1
                        if hits > 2:
                            break
                if hits > 2:
                    continue
                v = _primitive([sp * x - sn * y for x, y in zip(rn, rp)])
                new.append((v, common | bit))
        rays = [(r, z) for r, z, _ in plus] + zero + new
        if len(rays) > max_rays:
            raise IterationLimitError(
                f"{len(rays)} intermediate rays after {k + 1} inequalities "
                f"(limit {max_rays})")
    return [r for r, _ in rays]


def extreme_rays(cone: RationalCone, max_rays: int = DEFAULT_MAX_RAYS):
    """Minimal generators ``(rays, lineality)`` of ``cone``.

    Rays are canonical, orthogonal to the lineality space and sorted
    lexicographically; the lineality basis is in reduced echelon form.
    """
    d = cone.ambient_dim
    rows = [list(c) for c in cone.inequalities]
    lineality = nullspace(rows, d)
    if len(lineality) == d:
        return [], lineality
    eq = []
    for v in lineality:
        eq.append(list(v))
        eq.append([-x for x in v])
    rays = _double_description(eq + rows, d, len(eq), max_rays)
    return sorted({canonicalize_ray(r) for r in rays}), lineality


@dataclass
class RationalCone:
    """Cone in Q^ambient_dim given by inequalities ``c.x >= 0``.

    Inequalities are canonicalized, deduplicated and sorted on construction,
    so the stored H-representation is independent of input order.  Generators
    are computed lazily and cached.
    """

    ambient_dim: int
    inequalities: tuple = ()
    _gens: tuple | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.ambient_dim < 1:
            raise ValueError("ambient dimension must be positive")
        canon = set()
        for c in self.inequalities:
            if len(c) != self.ambient_dim:
                raise ValueError(
                    f"inequality of length {len(c)} in dimension {self.ambient_dim}")
            if any(x != 0 for x in c):
                canon.add(canonicalize_ray(c))
        self.inequalities = tuple(sorted(canon))

    @classmethod
    def from_generators(cls, ambient_dim: int, rays: Iterable, lineality: Iterable = ()):
        """H-representation of ``cone(rays) + span(lineality)`` via the dual cone."""
        rays, lineality = list(rays), list(lineality)
        dual_rows = [list(r) for r in rays]
        for v in lineality:
            dual_rows.append(list(v))
            dual_rows.append([-x for x in v])
        dual = cls(ambient_dim, dual_rows)
        drays, dlin = dual.generators()
        ineqs = list(drays)
        for v in dlin:
            ineqs.append(v)
            ineqs.append(tuple(-x for x in v))
        return cls(ambient_dim, ineqs)

    def generators(self, max_rays: int = DEFAULT_MAX_RAYS):
        if self._gens is None:
            rays, lin = extreme_rays(self, max_rays)
            self._gens = (tuple(rays), tuple(lin))
        return self._gens

    @property
    def rays(self) -> tuple:
        return self.generators()[0]

    @property
    def lineality(self) -> tuple:
        return self.generators()[1]

    def contains(self, x: Sequence) -> bool:
        return all(_dot(c, x) >= 0 for c in self.inequalities)

    def is_pointed(self) -> bool:
        return not self.lineality

    def generator_rows(self) -> list:
        """Rays plus both orientations of each lineality vector, as one generating list."""
        out = list(self.rays)
        for v in self.lineality:
            out.append(tuple(v))
            out.append(tuple(-x for x in v))
        return sorted(set(out))


def intersect(a: RationalCone, b: RationalCone) -> RationalCone:
    if a.ambient_dim != b.ambient_dim:
        raise ValueError(
            f"dimension mismatch: {a.ambient_dim} vs {b.ambient_dim}")
    return RationalCone(a.ambient_dim, a.inequalities + b.inequalities)


def valid_on_cone(c: Sequence, cone: RationalCone) -> bool:
    """Whether ``c.x >= 0`` on all of ``cone``, decided from its generators."""
    if len(c) != cone.ambient_dim:
        raise ValueError("functional has the wrong dimension")
    rays, lin = cone.generators()
    return all(_dot(c, r) >= 0 for r in rays) and all(_dot(c, v) == 0 for v in lin)


def farkas_certificate(c: Sequence, rows: Sequence[Sequence]):
    """Nonnegative multipliers ``lam`` with ``sum_i lam_i rows[i] == c``, or None.

    Exact phase-one simplex with Bland's rule.  A certificate exists iff
    ``c.x >= 0`` is implied by ``rows[i].x >= 0`` (Farkas).
    """
    m = len(rows)
    d = len(c)
    target = [Fraction(x) for x in c]
    if m == 0:
        return [] if all(x == 0 for x in target) else None
    # equations: for each coordinate j, sum_i rows[i][j] lam_i + art_j = c_j
    tab = []
    for j in range(d):
        sign = -1 if target[j] < 0 else 1
        row = [Fraction(sign * rows[i][j]) for i in range(m)]
        row += [Fraction(int(k == j)) for k in range(d)]
        row.append(sign * target[j])
        tab.append(row)
    n = m + d
    basis = [m + j for j in range(d)]
    # objective: minimize sum of artificials -> reduced costs
    obj = [Fraction(0)] * (n + 1)
    for row in tab:
        for k in range(n + 1):
            obj[k] -= row[k]
    for k in range(m, n):
        obj[k] += 1
    while True:
        enter = next((k for k in range(n) if obj[k] < 0), None)
        if enter is None:
            break
        best = None
        for r, row in enumerate(tab):
            if row[enter] > 0:
                ratio = row[-1] / row[enter]
                if best is None or ratio < best[0] or (ratio == best[0] and basis[r] < basis[best[1]]):
                    best = (ratio, r)
        if best is None:  # unbounded cannot happen in phase one
            raise RuntimeError("phase-one simplex reported unboundedness")
        r = best[1]
        p = tab[r][enter]
        tab[r] = [x / p for x in tab[r]]
        for i in range(d):
            if i != r and tab[i][enter] != 0:
                f = tab[i][enter]
                tab[i] = [x - f * y for x, y in zip(tab[i], tab[r])]
        if obj[enter] != 0:
            f = obj[enter]
            obj = [x - f * y for x, y in zip(obj, tab[r])]
        basis[r] = enter
    if -obj[-1] != 0:
        return None
    lam = [Fraction(0)] * m
    for r, b in enumerate(basis):
        if b < m:
            lam[b] = tab[r][-1]
    # certificate is checked, not trusted
    for j in range(d):
        if sum(lam[i] * rows[i][j] for i in range(m)) != target[j]:
            raise RuntimeError("Farkas certificate failed verification")
    return lam


def farkas_valid(c: Sequence, cone: RationalCone) -> bool:
    """Membership of ``c`` in the dual cone, decided by linear programming only."""
    return farkas_certificate(c, cone.inequalities) is not None


def ray_table_csv(rays: Iterable, columns: Sequence[str], label: str,
                  extra_name: str | None = None, extra: Sequence | None = None) -> str:
    """One row per ray: cone label, integer entries in ``columns`` order, optional tag."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header = ["cone", *columns] + ([extra_name] if extra_name else [])
    w.writerow(header)
    for k, r in enumerate(rays):
        row = [label, *(int(x) for x in r)]
        if extra_name:
            row.append(extra[k])
        w.writerow(row)
    return buf.getvalue()


def ray_table_json(rays: Iterable, columns: Sequence[str], label: str,
                   extra_name: str | None = None, extra: Sequence | None = None) -> dict:
    rows = []
    for k, r in enumerate(rays):
        row = {"cone": label, "ray": [int(x) for x in r]}
        if extra_name:
            row[extra_name] = extra[k]
        rows.append(row)
    return {"columns": list(columns), "rows": rows}


def read_ray_table_csv(text: str) -> tuple:
    """Inverse of :func:`ray_table_csv`; returns ``(label, columns, rays)``."""
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    reader = csv.reader(lines)
    header = next(reader)
    ncol = sum(1 for h in header[1:] if h not in ("tag", "classification"))
    rays, label = [], None
    for row in reader:
        label = row[0]
        rays.append(tuple(int(x) for x in row[1:1 + ncol]))
    return label, header[1:1 + ncol], rays


def dumps_ray_table(rays, columns, label, **kw) -> str:
    return json.dumps(ray_table_json(rays, columns, label, **kw), indent=2)
