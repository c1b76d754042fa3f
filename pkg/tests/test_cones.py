import itertools
import random

import pytest

from optcorr.cones import (
    IterationLimitError,
    RationalCone,
    canonicalize_ray,
    extreme_rays,
    farkas_certificate,
    farkas_valid,
    intersect,
    rank,
    read_ray_table_csv,
    ray_table_csv,
    valid_on_cone,
)
from optcorr.discovery import build_entropy_cone


def test_canonicalize():
    assert canonicalize_ray([2, -4, 6]) == (1, -2, 3)
    assert canonicalize_ray([0.5, 1.5]) == (1, 3)
    with pytest.raises(ValueError):
        canonicalize_ray([0, 0])


def test_orthant():
    rays, lin = extreme_rays(RationalCone(3, [(1, 0, 0), (0, 1, 0), (0, 0, 1)]))
    assert sorted(rays) == [(0, 0, 1), (0, 1, 0), (1, 0, 0)]
    assert lin == []


def test_halfspace_has_lineality():
    c = RationalCone(3, [(1, 0, 0)])
    assert c.rays == ((1, 0, 0),)
    assert len(c.lineality) == 2
    assert not c.is_pointed()
    assert len(c.generator_rows()) == 5


def test_square_cone():
    # cone over a square: x3 >= |x1|, x3 >= |x2|
    c = RationalCone(3, [(1, 0, 1), (-1, 0, 1), (0, 1, 1), (0, -1, 1)])
    assert sorted(c.rays) == sorted((a, b, 1) for a in (-1, 1) for b in (-1, 1))


def test_empty_interior_cone_is_origin():
    c = RationalCone(2, [(1, 0), (-1, 0), (0, 1), (0, -1)])
    assert c.rays == () and c.lineality == ()


def test_input_order_invariance():
    rows = [(1, 0, 1), (-1, 0, 1), (0, 1, 1), (0, -1, 1), (2, 0, 2)]
    base = RationalCone(3, rows).rays
    for perm in itertools.permutations(rows):
        assert RationalCone(3, list(perm)).rays == base


def test_iteration_limit():
    ent = build_entropy_cone()
    with pytest.raises(IterationLimitError):
        extreme_rays(RationalCone(ent.ambient_dim, ent.inequalities), max_rays=5)


def test_entropy_cone_regression():
    ent = build_entropy_cone()
    assert len(ent.inequalities) == 85
    assert len(ent.rays) == 59
    assert ent.is_pointed()


def test_extremality_by_rank():
    ent = build_entropy_cone()
    d = ent.ambient_dim
    for r in ent.rays:
        tight = [c for c in ent.inequalities if sum(a * b for a, b in zip(c, r)) == 0]
        assert rank(tight, d) == d - 1
        assert ent.contains(r)


def test_round_trip_from_generators():
    ent = build_entropy_cone()
    back = RationalCone.from_generators(ent.ambient_dim, ent.rays)
    assert sorted(back.rays) == sorted(ent.rays)
    for c in back.inequalities:
        assert valid_on_cone(c, ent)


def test_farkas_agrees_with_generators():
    ent = build_entropy_cone()
    rng = random.Random(5)
    n_valid = 0
    for _ in range(60):
        c = [rng.randint(-2, 2) for _ in range(ent.ambient_dim)]
        assert farkas_valid(c, ent) == valid_on_cone(c, ent)
    # nonnegative combinations of stored rows are valid by construction
    for _ in range(60):
        picks = rng.sample(ent.inequalities, 3)
        w = [rng.randint(0, 3) for _ in picks]
        c = [sum(wk * p[j] for wk, p in zip(w, picks)) for j in range(ent.ambient_dim)]
        if any(c):
            n_valid += 1
            assert valid_on_cone(c, ent)
            lam = farkas_certificate(c, ent.inequalities)
            assert lam is not None and min(lam) >= 0
    assert n_valid > 40


def test_intersect_dimension_mismatch():
    with pytest.raises(ValueError):
        intersect(RationalCone(2, [(1, 0)]), RationalCone(3, [(1, 0, 0)]))


def test_csv_round_trip():
    rays = [(1, 0, -1), (0, 2, 1)]
    text = "# header comment\n" + ray_table_csv(rays, ["x", "y", "z"], "K", "tag", ["a", "b"])
    label, cols, back = read_ray_table_csv(text)
    assert label == "K" and cols == ["x", "y", "z"] and back == rays
