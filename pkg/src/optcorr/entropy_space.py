"""Linear entropy functionals over a finite set of parties.

A functional is a coefficient vector indexed by the nonempty subsets of the
party set.  Subsets are identified with bitmasks (bit ``k`` set means party
``k`` is present) and stored at position ``mask - 1``, so the canonical order
is plain binary counting with the first party as the least-significant bit.
The empty set carries entropy zero and is never stored.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Sequence


class OverlapError(ValueError):
    """Subsets that must be disjoint share a party."""


class EmptySubsetError(ValueError):
    """A subset that must be nonempty is empty."""


def _as_labels(subset) -> tuple:
    # a bare string is one label, never a sequence of one-character labels
    if isinstance(subset, str):
        return (subset,)
    return tuple(subset)


@dataclass(frozen=True)
class PartySet:
    parties: tuple

    def __post_init__(self):
        parties = tuple(self.parties)
        object.__setattr__(self, "parties", parties)
        if len(parties) < 2:
            raise ValueError("a party set needs at least two parties")
        if len(set(parties)) != len(parties):
            raise ValueError(f"duplicate party labels in {parties}")

    @property
    def n(self) -> int:
        return len(self.parties)

    @property
    def size(self) -> int:
        """Number of nonempty subsets, i.e. the ambient dimension."""
        return (1 << self.n) - 1

    def index(self, subset) -> int:
        """Bitmask of ``subset``; an int is taken to be a mask already."""
        if isinstance(subset, int):
            if not 0 <= subset <= self.size:
                raise IndexError(f"subset index {subset} out of range")
            return subset
        mask = 0
        for label in _as_labels(subset):
            try:
                mask |= 1 << self.parties.index(label)
            except ValueError:
                raise KeyError(f"unknown party {label!r}") from None
        return mask

    def subset(self, mask: int) -> tuple:
        if not 1 <= mask <= self.size:
            raise IndexError(f"subset index {mask} out of range")
        return tuple(p for k, p in enumerate(self.parties) if mask >> k & 1)

    def label(self, mask: int) -> str:
        return "".join(self.subset(mask))

    def from_label(self, label: str) -> int:
        """Inverse of :meth:`label`; parses greedily, longest label first."""
        mask, rest = 0, label
        ordered = sorted(self.parties, key=len, reverse=True)
        while rest:
            for p in ordered:
                if rest.startswith(p):
                    mask |= 1 << self.parties.index(p)
                    rest = rest[len(p):]
                    break
            else:
                raise KeyError(f"cannot parse subset label {label!r}")
        return mask


@dataclass(frozen=True)
class EntropyFunctional:
    party_set: PartySet
    coeffs: tuple

    def __post_init__(self):
        coeffs = tuple(self.coeffs)
        object.__setattr__(self, "coeffs", coeffs)
        if len(coeffs) != self.party_set.size:
            raise ValueError(
                f"expected {self.party_set.size} coefficients, got {len(coeffs)}")

    @classmethod
    def zero(cls, party_set: PartySet, exact: bool = True) -> EntropyFunctional:
        z = Fraction(0) if exact else 0.0
        return cls(party_set, (z,) * party_set.size)

    @classmethod
    def from_terms(cls, party_set: PartySet, terms: Iterable, exact: bool = True):
        """Build from ``(subset, coefficient)`` pairs; equal subsets accumulate."""
        coeffs = list(cls.zero(party_set, exact).coeffs)
        for subset, c in terms:
            mask = party_set.index(subset)
            if mask == 0:
                continue
            coeffs[mask - 1] += Fraction(c) if exact else float(c)
        return cls(party_set, coeffs)

    def coeff(self, subset) -> Rational | float:
        return self.coeffs[self.party_set.index(subset) - 1]

    def _check(self, other: EntropyFunctional):
        if other.party_set != self.party_set:
            raise ValueError("functionals live on different party sets")

    def __add__(self, other: EntropyFunctional) -> EntropyFunctional:
        self._check(other)
        return EntropyFunctional(
            self.party_set, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: EntropyFunctional) -> EntropyFunctional:
        self._check(other)
        return EntropyFunctional(
            self.party_set, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> EntropyFunctional:
        return EntropyFunctional(self.party_set, tuple(-a for a in self.coeffs))

    def __mul__(self, scalar) -> EntropyFunctional:
        return EntropyFunctional(self.party_set, tuple(scalar * a for a in self.coeffs))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def evaluate(self, h: Sequence) -> Rational | float:
        """Dot product with an entropy vector in canonical subset order."""
        if len(h) != len(self.coeffs):
            raise ValueError("entropy vector has the wrong length")
        return sum(c * x for c, x in zip(self.coeffs, h))

    def to_float(self) -> EntropyFunctional:
        return EntropyFunctional(self.party_set, tuple(float(c) for c in self.coeffs))

    def to_triples(self) -> list:
        """Nonzero terms as ``(label, numerator, denominator)`` triples."""
        out = []
        for mask, c in enumerate(self.coeffs, start=1):
            if c != 0:
                q = Fraction(c)
                out.append((self.party_set.label(mask), q.numerator, q.denominator))
        return out

    @classmethod
    def from_triples(cls, party_set: PartySet, triples: Iterable) -> EntropyFunctional:
        return cls.from_terms(
            party_set,
            ((party_set.from_label(lab), Fraction(num, den)) for lab, num, den in triples))

    def __str__(self):
        terms = []
        for lab, num, den in self.to_triples():
            q = Fraction(num, den)
            terms.append(f"{'+' if q > 0 else '-'} {abs(q)}*S_{lab}")
        return " ".join(terms) if terms else "0"


def entropy(party_set: PartySet, subset, exact: bool = True) -> EntropyFunctional:
    """The functional ``S_subset``."""
    return EntropyFunctional.from_terms(party_set, [(subset, 1)], exact)


def _disjoint_masks(party_set: PartySet, named: dict, may_be_empty=()) -> dict:
    masks = {}
    for name, subset in named.items():
        m = party_set.index(subset)
        if m == 0 and name not in may_be_empty:
            raise EmptySubsetError(f"{name} must be nonempty")
        masks[name] = m
    names = list(masks)
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            if masks[a] & masks[b]:
                raise OverlapError(f"{a} and {b} overlap")
    return masks


def cmi_functional(party_set: PartySet, X, Y, Z=()) -> EntropyFunctional:
    """``I(X:Y|Z) = S_XZ + S_YZ - S_XYZ - S_Z``; with ``Z`` empty, plain mutual information."""
    m = _disjoint_masks(party_set, {"X": X, "Y": Y, "Z": Z}, may_be_empty=("Z",))
    x, y, z = m["X"], m["Y"], m["Z"]
    return EntropyFunctional.from_terms(
        party_set, [(party_set.subset(x | z), 1), (party_set.subset(y | z), 1),
                    (party_set.subset(x | y | z), -1),
                    (party_set.subset(z) if z else (), -1)])


def conditional_entropy(party_set: PartySet, X, Y=()) -> EntropyFunctional:
    """``S(X|Y) = S_XY - S_Y``."""
    m = _disjoint_masks(party_set, {"X": X, "Y": Y}, may_be_empty=("Y",))
    x, y = m["X"], m["Y"]
    terms = [(party_set.subset(x | y), 1)]
    if y:
        terms.append((party_set.subset(y), -1))
    return EntropyFunctional.from_terms(party_set, terms)


def wm_functional(party_set: PartySet, C, X, Y) -> EntropyFunctional:
    """Weak monotonicity ``S(C|X) + S(C|Y) = S_CX + S_CY - S_X - S_Y``."""
    m = _disjoint_masks(party_set, {"C": C, "X": X, "Y": Y})
    c, x, y = m["C"], m["X"], m["Y"]
    return EntropyFunctional.from_terms(
        party_set, [(party_set.subset(c | x), 1), (party_set.subset(c | y), 1),
                    (party_set.subset(x), -1), (party_set.subset(y), -1)])


# Column order of the coefficient tables: A, B, V, AB, AV, BV, ABV.
ALPHA_SLOTS = ("A", "B", "V", "AB", "AV", "BV", "ABV")
ABV = PartySet(("A", "B", "V"))
# slot position -> bitmask over (A, B, V)
SLOT_MASKS = tuple(ABV.from_label(s) for s in ALPHA_SLOTS)


@dataclass(frozen=True)
class AlphaVector:
    """Seven coefficients of ``f = sum_J alpha_J S_J`` over nonempty ``J`` of {A, B, V}.

    ``coeffs`` holds Fractions (exact flavor) or floats; conversion between the
    two is always explicit.
    """

    coeffs: tuple

    def __post_init__(self):
        coeffs = tuple(self.coeffs)
        if len(coeffs) != 7:
            raise ValueError(f"an alpha vector has 7 entries, got {len(coeffs)}")
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def exact(cls, values: Iterable) -> AlphaVector:
        return cls(tuple(Fraction(v) for v in values))

    @classmethod
    def real(cls, values: Iterable) -> AlphaVector:
        return cls(tuple(float(v) for v in values))

    @classmethod
    def unit(cls, slot: str, exact: bool = True) -> AlphaVector:
        vals = [int(s == slot) for s in ALPHA_SLOTS]
        if sum(vals) != 1:
            raise KeyError(slot)
        return cls.exact(vals) if exact else cls.real(vals)

    @property
    def is_exact(self) -> bool:
        return all(isinstance(c, Rational) for c in self.coeffs)

    def to_float(self) -> AlphaVector:
        return AlphaVector.real(self.coeffs)

    def to_exact(self) -> AlphaVector:
        return AlphaVector.exact(self.coeffs)

    def __getitem__(self, key):
        if isinstance(key, str):
            return self.coeffs[ALPHA_SLOTS.index(key)]
        return self.coeffs[key]

    def __iter__(self):
        return iter(self.coeffs)

    def __len__(self):
        return 7

    def __add__(self, other: AlphaVector) -> AlphaVector:
        return AlphaVector(tuple(a + b for a, b in zip(self, other)))

    def __mul__(self, scalar) -> AlphaVector:
        return AlphaVector(tuple(scalar * a for a in self))

    __rmul__ = __mul__

    def as_dict(self) -> dict:
        return dict(zip(ALPHA_SLOTS, self.coeffs))

    def __str__(self):
        return "(" + ", ".join(str(c) for c in self.coeffs) + ")"


def alpha_to_functional(alpha: AlphaVector | Sequence, grouping: Mapping,
                        party_set: PartySet) -> EntropyFunctional:
    """Rewrite ``f^alpha`` on a finer system where A, B, V are unions of parties.

    ``grouping`` maps each of ``"A"``, ``"B"``, ``"V"`` to a set of labels of
    ``party_set``.  An image may be empty only if every coefficient touching
    that slot vanishes.
    """
    alpha = alpha if isinstance(alpha, AlphaVector) else AlphaVector(tuple(alpha))
    exact = alpha.is_exact
    masks = {}
    for slot in "ABV":
        masks[slot] = party_set.index(grouping.get(slot, ()))
    for a, b in (("A", "B"), ("A", "V"), ("B", "V")):
        if masks[a] & masks[b]:
            raise OverlapError(f"grouping images of {a} and {b} overlap")
    terms = []
    for slot, c in zip(ALPHA_SLOTS, alpha):
        if c == 0:
            continue
        empty = [s for s in slot if masks[s] == 0]
        if empty:
            raise EmptySubsetError(
                f"slot {slot} has coefficient {c} but {empty[0]} maps to nothing")
        union = 0
        for s in slot:
            union |= masks[s]
        terms.append((party_set.subset(union), c))
    return EntropyFunctional.from_terms(party_set, terms, exact=exact)
