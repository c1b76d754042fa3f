from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from optcorr.entropy_space import (
    ABV,
    ALPHA_SLOTS,
    AlphaVector,
    EmptySubsetError,
    EntropyFunctional,
    OverlapError,
    PartySet,
    alpha_to_functional,
    cmi_functional,
    conditional_entropy,
    entropy,
    wm_functional,
)

PS4 = PartySet(("A", "B", "C", "D"))


def test_first_party_is_lowest_bit():
    assert PS4.index(("A",)) == 1
    assert PS4.index(("B",)) == 2
    assert PS4.index(("A", "D")) == 9
    assert PS4.size == 15
    assert PS4.label(PS4.from_label("BD")) == "BD"


def test_abv_slot_masks():
    assert [ABV.from_label(s) for s in ALPHA_SLOTS] == [1, 2, 4, 3, 5, 6, 7]


def test_cmi_expansion():
    f = cmi_functional(PS4, ("A",), ("B",), ("C",))
    assert f.coeff(("A", "C")) == 1 and f.coeff(("B", "C")) == 1
    assert f.coeff(("A", "B", "C")) == -1 and f.coeff("C") == -1
    assert sum(1 for c in f.coeffs if c) == 4


def test_mutual_information_has_no_empty_term():
    f = cmi_functional(PS4, ("A",), ("B",))
    assert f == entropy(PS4, "A") + entropy(PS4, "B") - entropy(PS4, ("A", "B"))


def test_conditional_entropy():
    assert conditional_entropy(PS4, ("A",), ("B",)) == entropy(PS4, ("A", "B")) - entropy(PS4, "B")


def test_overlap_and_empty_rejected():
    with pytest.raises(OverlapError):
        cmi_functional(PS4, ("A", "B"), ("B",))
    with pytest.raises(EmptySubsetError):
        wm_functional(PS4, (), ("A",), ("B",))


def test_triples_round_trip():
    f = cmi_functional(PS4, ("A",), ("B", "D"), ("C",)) * Fraction(1, 2)
    assert EntropyFunctional.from_triples(PS4, f.to_triples()) == f
    assert ("AC", 1, 2) in f.to_triples()


coeffs = st.lists(st.fractions(max_denominator=12), min_size=15, max_size=15)


@given(coeffs, coeffs)
def test_functional_arithmetic(a, b):
    fa = EntropyFunctional(PS4, tuple(a))
    fb = EntropyFunctional(PS4, tuple(b))
    assert (fa + fb) - fb == fa
    assert (fa - fa).is_zero()
    assert (2 * fa).coeffs == tuple(2 * x for x in a)
    h = list(range(1, 16))
    assert (fa + fb).evaluate(h) == fa.evaluate(h) + fb.evaluate(h)


def test_alpha_slot_access_and_flavors():
    a = AlphaVector.exact([1, 0, 0, 0, Fraction(1, 2), 0, -1])
    assert a["AV"] == Fraction(1, 2) and a["ABV"] == -1
    assert a.is_exact and not a.to_float().is_exact
    assert a.to_float().to_exact() == a
    assert AlphaVector.unit("BV")["BV"] == 1
    with pytest.raises(ValueError):
        AlphaVector.exact([1, 2, 3])


def test_alpha_to_functional_regroups():
    ps = PartySet(("A1", "A2", "B", "V"))
    grouping = {"A": ("A1", "A2"), "B": ("B",), "V": ("V",)}
    f = alpha_to_functional(AlphaVector.unit("AV"), grouping, ps)
    assert f == entropy(ps, ("A1", "A2", "V"))
    g = alpha_to_functional(AlphaVector.unit("A"), {"A": ("A1",), "B": ("B",), "V": ("A2", "V")}, ps)
    assert g == entropy(ps, ("A1",))
