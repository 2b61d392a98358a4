"""Polytope geometry: validation, faces, polarization, triangulation."""

import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latticesum import errors
from latticesum.polytope import (
    HPolytope,
    bounding_box,
    choose_polarizing_vector,
    compute_vertices,
    enumerate_lattice_points,
    face_lattice,
    polar_decomposition_check,
    polarize,
    simplex_volume,
    triangulate,
    validate,
    weighted_indicator,
    weighted_sum_bruteforce,
)

from conftest import CORPUS, nonregular_triangle, simplex2, unit_cube, unit_square


# ---------------------------------------------------------------------------
# Validation and vertices
# ---------------------------------------------------------------------------

def test_corpus_validates(corpus_polytope):
    report = validate(corpus_polytope)
    assert report.valid, report.errors


EXPECTED_VERTICES = {
    "unit_square": {(0, 0), (1, 0), (0, 1), (1, 1)},
    "simplex2_2x": {(0, 0), (2, 0), (0, 2)},
    "nonregular_triangle": {(0, 0), (1, 0), (0, 2)},
    "nonregular_simplex3": {(0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 2)},
}


@pytest.mark.parametrize("name", sorted(EXPECTED_VERTICES))
def test_vertex_sets(name):
    H = CORPUS[name]
    got = {tuple(int(c) for c in v.coords) for v in compute_vertices(H)}
    assert got == EXPECTED_VERTICES[name]


def test_error_not_primitive():
    report = validate(HPolytope([[2, 0], [0, 1], [-1, -1]], [0, 0, 2]))
    assert not report.valid
    assert any(kind is errors.NotPrimitive for kind, _, _ in report.errors)


def test_error_unbounded():
    report = validate(HPolytope([[1, 0], [0, 1]], [0, 0]))
    assert not report.valid
    assert any(kind is errors.Unbounded for kind, _, _ in report.errors)


def test_error_not_simple():
    # four facets through the origin in the plane
    H = HPolytope([[1, 0], [0, 1], [1, 1], [-1, -1]], [0, 0, 0, 1])
    report = validate(H)
    assert not report.valid
    assert any(
        kind in (errors.NotSimple, errors.Redundant)
        for kind, _, _ in report.errors
    )


def test_error_not_integral():
    report = validate(HPolytope([[1, 0], [0, 1], [-1, -2]], [0, 0, 1]))
    assert not report.valid
    assert any(kind is errors.NotIntegral for kind, _, _ in report.errors)


def test_error_redundant():
    H = HPolytope([[1, 0], [0, 1], [-1, 0], [0, -1], [-1, 0]], [0, 0, 1, 1, 5])
    report = validate(H)
    assert not report.valid
    assert any(kind is errors.Redundant for kind, _, _ in report.errors)


def test_too_large_cap(monkeypatch):
    monkeypatch.setenv("LE_MAX_LATTICE_POINTS", "3")
    H = HPolytope([[1], [-1]], [0, 10])
    with pytest.raises(errors.TooLarge):
        enumerate_lattice_points(H)


def test_raise_first():
    report = validate(HPolytope([[1, 0], [0, 1]], [0, 0]))
    with pytest.raises(errors.LatticeSumError):
        report.raise_first()


# ---------------------------------------------------------------------------
# Face lattice
# ---------------------------------------------------------------------------

FACE_COUNTS = {
    # codim 0 (the polytope), 1 (facets), ..., n (vertices)
    "unit_square": (1, 4, 4),
    "simplex2_1x": (1, 3, 3),
    "unit_cube": (1, 6, 12, 8),
    "nonregular_triangle": (1, 3, 3),
    "nonregular_simplex3": (1, 4, 6, 4),
}


@pytest.mark.parametrize("name", sorted(FACE_COUNTS))
def test_face_counts_and_euler(name):
    H = CORPUS[name]
    lat = face_lattice(H)
    counts = tuple(len(lat.by_codim(k)) for k in range(H.dim + 1))
    assert counts == FACE_COUNTS[name]
    # Euler relation for the boundary complex of an n-polytope
    euler = sum((-1) ** (H.dim - k) * counts[k] for k in range(1, H.dim + 1))
    assert euler == 1 - (-1) ** H.dim


# ---------------------------------------------------------------------------
# Polarization and the weighted Lawrence identity
# ---------------------------------------------------------------------------

def test_polarized_cones_structure(corpus_polytope):
    H = corpus_polytope
    xi = choose_polarizing_vector(H, seed=0)
    cones = polarize(H, xi)
    assert len(cones) == len(compute_vertices(H))
    for C in cones:
        assert len(C.facet_ids) == H.dim
        for i in C.facet_ids:
            # u_i^# pairs positively with its own flipped edge vector
            pairing = sum(
                Fraction(a) * b for a, b in zip(C.u_sharp(i), C.alpha_sharp(i))
            )
            assert pairing > 0
            # all flipped edges pair strictly negatively with xi
            assert sum(
                Fraction(x) * a for x, a in zip(C.xi, C.alpha_sharp(i))
            ) < 0


def test_nongeneric_xi_rejected():
    with pytest.raises(errors.NonGeneric):
        polarize(unit_square(), (1, 0))


def test_weighted_indicator_values():
    H = nonregular_triangle()
    assert weighted_indicator(H, (Fraction(1, 3), Fraction(1, 3))) == 1
    assert weighted_indicator(H, (0, 0)) == Fraction(1, 4)
    assert weighted_indicator(H, (0, 1)) == Fraction(1, 2)
    assert weighted_indicator(H, (5, 5)) == 0


def test_polar_decomposition_lattice_points(corpus_polytope):
    H = corpus_polytope
    lo, hi = bounding_box(H)
    pts = []
    import itertools

    for x in itertools.product(
        *(range(int(a) - 1, int(b) + 2) for a, b in zip(lo, hi))
    ):
        pts.append(tuple(Fraction(c) for c in x))
    for seed in (0, 1):
        xi = choose_polarizing_vector(H, seed)
        assert polar_decomposition_check(H, xi, pts)


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_polar_decomposition_random_rational(data):
    H = CORPUS[data.draw(st.sampled_from(sorted(CORPUS)))]
    lo, hi = bounding_box(H)
    pt = tuple(
        data.draw(
            st.fractions(
                min_value=int(a) - 2, max_value=int(b) + 2, max_denominator=7
            )
        )
        for a, b in zip(lo, hi)
    )
    xi = choose_polarizing_vector(H, seed=0)
    assert polar_decomposition_check(H, xi, [pt])


# ---------------------------------------------------------------------------
# Triangulation and volumes
# ---------------------------------------------------------------------------

VOLUMES = {
    "unit_square": Fraction(1),
    "simplex2_3x": Fraction(9, 2),
    "unit_cube": Fraction(1),
    "nonregular_triangle": Fraction(1),
    "nonregular_simplex3": Fraction(1, 3),
}


@pytest.mark.parametrize("name", sorted(VOLUMES))
def test_triangulation_volume(name):
    H = CORPUS[name]
    verts = {v.id: v.coords for v in compute_vertices(H)}
    pieces = [
        abs(simplex_volume([verts[i] for i in ids]))
        for ids, _ in triangulate(H)
    ]
    assert all(vol > 0 for vol in pieces)
    assert sum(pieces) == VOLUMES[name]


# ---------------------------------------------------------------------------
# Enumeration oracle and JSON round trips
# ---------------------------------------------------------------------------

def test_weighted_count_oracles():
    one = lambda x: Fraction(1)
    assert weighted_sum_bruteforce(nonregular_triangle(), one) == Fraction(5, 4)
    assert weighted_sum_bruteforce(simplex2(2), one) == Fraction(9, 4)
    assert weighted_sum_bruteforce(unit_cube(), one) == Fraction(1)
    # interval [0,5]: 1/2 + 4 + 1/2 = 5
    assert weighted_sum_bruteforce(HPolytope([[1], [-1]], [0, 5]), one) == 5


def test_lattice_point_codims():
    pts = dict(enumerate_lattice_points(nonregular_triangle()))
    assert pts[(0, 0)] == 2 and pts[(0, 1)] == 1 and pts[(1, 0)] == 2


def test_json_round_trip(corpus_polytope):
    H = corpus_polytope
    obj = H.to_json()
    back = HPolytope.from_json(json.dumps(obj))
    assert back.normals == H.normals and back.offsets == H.offsets
    # vertex cross-check path
    obj2 = dict(obj)
    obj2["vertices"] = [
        [int(c) for c in v.coords] for v in compute_vertices(H)
    ]
    assert HPolytope.from_json(obj2).normals == H.normals


def test_json_vertex_mismatch():
    obj = nonregular_triangle().to_json()
    obj["vertices"] = [[0, 0], [1, 0], [0, 3]]
    with pytest.raises(errors.LatticeSumError):
        HPolytope.from_json(obj)


def test_json_parse_error():
    with pytest.raises(errors.ParseError):
        HPolytope.from_json("{not json")
