"""Shared fixtures: the polytope corpus used across the test suite."""

from fractions import Fraction

import pytest

from latticesum.polytope import HPolytope


def unit_square() -> HPolytope:
    return HPolytope([[1, 0], [0, 1], [-1, 0], [0, -1]], [0, 0, 1, 1])


def simplex2(scale: int = 1) -> HPolytope:
    return HPolytope([[1, 0], [0, 1], [-1, -1]], [0, 0, scale])


def unit_cube() -> HPolytope:
    return HPolytope(
        [[1, 0, 0], [0, 1, 0], [0, 0, 1], [-1, 0, 0], [0, -1, 0], [0, 0, -1]],
        [0, 0, 0, 1, 1, 1],
    )


def nonregular_triangle(scale: int = 1) -> HPolytope:
    # vertices (0,0), (scale,0), (0,2*scale); the hypotenuse normal (-2,-1)
    # makes the vertex (scale,0) non-unimodular (group of order 2).
    return HPolytope([[1, 0], [0, 1], [-2, -1]], [0, 0, 2 * scale])


def nonregular_simplex3() -> HPolytope:
    # vertices (0,0,0), (1,0,0), (0,1,0), (1,1,2)
    return HPolytope(
        [[0, 0, 1], [0, 2, -1], [2, 0, -1], [-2, -2, 1]], [0, 0, 0, 2]
    )


CORPUS = {
    "unit_square": unit_square(),
    "simplex2_1x": simplex2(1),
    "simplex2_2x": simplex2(2),
    "simplex2_3x": simplex2(3),
    "simplex2_4x": simplex2(4),
    "unit_cube": unit_cube(),
    "nonregular_triangle": nonregular_triangle(),
    "nonregular_simplex3": nonregular_simplex3(),
}


@pytest.fixture(params=sorted(CORPUS), ids=sorted(CORPUS))
def corpus_polytope(request) -> HPolytope:
    return CORPUS[request.param]


def random_multipoly(rng, dim: int, max_degree: int):
    """Seeded sparse random polynomial with small integer coefficients."""
    from latticesum.multipoly import MultiPoly

    terms = {}
    for _ in range(rng.randint(1, 6)):
        e = [0] * dim
        for _ in range(rng.randint(0, max_degree)):
            e[rng.randrange(dim)] += 1
        terms[tuple(e)] = terms.get(tuple(e), Fraction(0)) + Fraction(
            rng.randint(-9, 9)
        )
    return MultiPoly(dim, terms)


def bruteforce_poly(H: HPolytope, p):
    from latticesum.polytope import weighted_sum_bruteforce

    return weighted_sum_bruteforce(
        H, lambda x: p.evaluate([Fraction(c) for c in x])
    )
