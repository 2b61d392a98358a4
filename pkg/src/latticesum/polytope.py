"""Simple integral polytopes in H-form: validation, vertices, face lattice,
tangent-cone polarization, polar decomposition, triangulation, and the
brute-force lattice enumeration oracle.

Convention: facet i is the half-space <u_i, x> + mu_i >= 0 with u_i a
primitive integer inward normal and mu_i an integer offset.
"""

from __future__ import annotations

import itertools
import json
import math
import os
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (
    DecompositionViolated,
    InternalError,
    NonGeneric,
    NotIntegral,
    NotPrimitive,
    NotSimple,
    ParseError,
    Redundant,
    Singular,
    TooLarge,
    Unbounded,
)
from .exactnum import det_rational, gcd_vector, solve_rational_system
from .multipoly import MultiPoly

DEFAULT_MAX_LATTICE_POINTS = 10_000_000


def max_lattice_points() -> int:
    return int(os.environ.get("LE_MAX_LATTICE_POINTS", DEFAULT_MAX_LATTICE_POINTS))


def dot(u, x):
    return sum(a * b for a, b in zip(u, x))


# ---------------------------------------------------------------------------
# Core types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Vertex:
    id: int
    coords: tuple
    tight: frozenset  # facet indices where <u_i, v> + mu_i = 0


@dataclass(frozen=True)
class Face:
    index_set: frozenset  # I_F, facet indices meeting at F
    vertex_ids: tuple

    @property
    def codim(self) -> int:
        return len(self.index_set)


@dataclass(frozen=True)
class FaceLattice:
    faces: tuple  # all faces, Delta (empty index set) first, then by codim

    def by_codim(self, k: int):
        return [f for f in self.faces if f.codim == k]

    def __len__(self):
        return len(self.faces)


@dataclass(frozen=True)
class PolarizingVector:
    xi: tuple  # rational covector


@dataclass(frozen=True)
class PolarizedCone:
    """Tangent cone at a vertex with edges flipped along the polarization."""

    vertex: Vertex
    facet_ids: tuple         # sorted I_v
    alpha: dict              # i -> edge vector (dual basis), Fractions
    normals: dict            # i -> primitive inward normal u_i of the parent
    flip: dict               # i -> +1 / -1; -1 iff <xi, alpha_i> > 0
    xi: tuple

    @property
    def flip_count(self) -> int:
        return sum(1 for s in self.flip.values() if s < 0)

    def alpha_sharp(self, i):
        return tuple(self.flip[i] * a for a in self.alpha[i])

    def u_sharp(self, i):
        return tuple(self.flip[i] * c for c in self.normals[i])


@dataclass
class ValidationReport:
    valid: bool
    errors: list = field(default_factory=list)  # (kind, offending indices, message)
    vertices: list = field(default_factory=list)

    def raise_first(self):
        if not self.valid:
            kind, _, msg = self.errors[0]
            raise kind(msg)


class HPolytope:
    """Simple integral polytope as integer facet data (immutable)."""

    def __init__(self, normals, offsets):
        self.normals = tuple(tuple(int(c) for c in u) for u in normals)
        self.offsets = tuple(int(m) for m in offsets)
        if len(self.normals) != len(self.offsets):
            raise ValueError("normals/offsets length mismatch")
        if not self.normals:
            raise ValueError("no facets")
        self.dim = len(self.normals[0])
        if any(len(u) != self.dim for u in self.normals):
            raise ValueError("inconsistent normal dimensions")
        self._vertices = None
        self._lattice = None

    @property
    def num_facets(self) -> int:
        return len(self.normals)

    # -- serialization -------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "normals": [list(u) for u in self.normals],
            "offsets": list(self.offsets),
        }

    @classmethod
    def from_json(cls, obj) -> "HPolytope":
        if isinstance(obj, str):
            try:
                obj = json.loads(obj)
            except json.JSONDecodeError as exc:
                raise ParseError(f"bad polytope JSON: {exc}") from exc
        try:
            h = cls(obj["normals"], obj["offsets"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad polytope object: {exc}") from exc
        if "dim" in obj and obj["dim"] != h.dim:
            raise ParseError("declared dim does not match normals")
        if "vertices" in obj:
            declared = sorted(tuple(map(int, v)) for v in obj["vertices"])
            actual = sorted(v.coords for v in compute_vertices(h))
            if declared != actual:
                raise ParseError("declared vertices do not match facet data")
        return h

    def __repr__(self):
        return f"HPolytope(normals={self.normals}, offsets={self.offsets})"


# ---------------------------------------------------------------------------
# Vertices and validation
# ---------------------------------------------------------------------------

def _solve_vertex_candidates(normals, offsets, n):
    """All candidate vertices: exact solutions of n-subsets of tight facets
    that satisfy the remaining constraints.  Shared by the integer polytope
    path and the rational-offset dilation oracle."""
    d = len(normals)
    seen = {}
    for subset in itertools.combinations(range(d), n):
        rows = [normals[i] for i in subset]
        if det_rational([[Fraction(c) for c in row] for row in rows]) == 0:
            continue
        x = solve_rational_system(rows, [-Fraction(offsets[i]) for i in subset])
        vals = [dot(normals[i], x) + offsets[i] for i in range(d)]
        if any(v < 0 for v in vals):
            continue
        tight = frozenset(i for i, v in enumerate(vals) if v == 0)
        key = tuple(x)
        if key not in seen:
            seen[key] = tight
    out = []
    for vid, (coords, tight) in enumerate(sorted(seen.items())):
        out.append(Vertex(vid, coords, tight))
    return out


def _recession_ray(normals, n):
    """A nonzero direction y with <u_i, y> >= 0 for all i, or None.

    Exact unboundedness witness: either the normals do not span R^n (the
    recession cone contains a line) or some extreme-ray candidate, cut out
    by n-1 independent normals, satisfies every constraint.
    """
    d = len(normals)
    rank_rows = [[Fraction(c) for c in u] for u in normals]
    if _rank(rank_rows) < n:
        y = _kernel_vector(rank_rows, n)
        return y
    if n == 1:
        for y in ((1,), (-1,)):
            if all(dot(u, y) >= 0 for u in normals):
                return y
        return None
    for subset in itertools.combinations(range(d), n - 1):
        rows = [[Fraction(c) for c in normals[i]] for i in subset]
        if _rank(rows) != n - 1:
            continue
        y = _kernel_vector(rows, n)
        for cand in (y, tuple(-c for c in y)):
            if all(dot(u, cand) >= 0 for u in normals):
                return cand
    return None


def _rank(rows):
    a = [list(r) for r in rows]
    if not a:
        return 0
    m, n = len(a), len(a[0])
    rank = 0
    for col in range(n):
        piv = next((r for r in range(rank, m) if a[r][col] != 0), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        inv = Fraction(1) / a[rank][col]
        a[rank] = [e * inv for e in a[rank]]
        for r in range(m):
            if r != rank and a[r][col] != 0:
                f = a[r][col]
                a[r] = [e - f * p for e, p in zip(a[r], a[rank])]
        rank += 1
    return rank


def _kernel_vector(rows, n):
    """A nonzero rational vector in the kernel of the row set (rank < n)."""
    a = [list(r) + [Fraction(0)] for r in rows]
    # Reduced row echelon; read off a free-variable solution.
    m = len(a)
    pivots = {}
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, m) if a[i][col] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = Fraction(1) / a[r][col]
        a[r] = [e * inv for e in a[r]]
        for i in range(m):
            if i != r and a[i][col] != 0:
                f = a[i][col]
                a[i] = [e - f * p for e, p in zip(a[i], a[r])]
        pivots[col] = r
        r += 1
    free = next(c for c in range(n) if c not in pivots)
    y = [Fraction(0)] * n
    y[free] = Fraction(1)
    for col, row in pivots.items():
        y[col] = -a[row][free]
    return tuple(y)


def validate(H: HPolytope) -> ValidationReport:
    """Check primitivity, boundedness, simplicity, integrality, irredundancy."""
    errors = []
    bad_prim = [i for i, u in enumerate(H.normals) if gcd_vector(u) != 1]
    if bad_prim:
        errors.append((NotPrimitive, bad_prim, f"non-primitive normals at {bad_prim}"))

    ray = _recession_ray(H.normals, H.dim)
    if ray is not None:
        errors.append((Unbounded, [], f"unbounded: recession direction {ray}"))
        return ValidationReport(False, errors)

    vertices = _solve_vertex_candidates(H.normals, H.offsets, H.dim)
    if not vertices:
        errors.append((Unbounded, [], "empty intersection"))
        return ValidationReport(False, errors)

    bad_simple = [v.id for v in vertices if len(v.tight) != H.dim]
    if bad_simple:
        errors.append(
            (NotSimple, bad_simple, f"vertices with != n tight facets: {bad_simple}")
        )

    bad_int = [v.id for v in vertices if any(c.denominator != 1 for c in v.coords)]
    if bad_int:
        errors.append((NotIntegral, bad_int, f"non-integral vertices: {bad_int}"))

    redundant = []
    for i in range(H.num_facets):
        tight_verts = [v for v in vertices if i in v.tight]
        if len(tight_verts) < H.dim:
            redundant.append(i)
        else:
            rows = [
                [a - b for a, b in zip(v.coords, tight_verts[0].coords)]
                for v in tight_verts[1:]
            ]
            if _rank(rows) < H.dim - 1:
                redundant.append(i)
    if redundant:
        errors.append((Redundant, redundant, f"redundant facets: {redundant}"))

    if errors:
        return ValidationReport(False, errors, vertices)
    return ValidationReport(True, [], vertices)


def compute_vertices(H: HPolytope) -> list:
    """Vertices with integer coordinates and their tight facet sets."""
    if H._vertices is None:
        verts = _solve_vertex_candidates(H.normals, H.offsets, H.dim)
        for v in verts:
            if len(v.tight) != H.dim:
                raise NotSimple(f"vertex {tuple(map(str, v.coords))} tight on {len(v.tight)} facets")
        norm = []
        for v in verts:
            if any(c.denominator != 1 for c in v.coords):
                raise NotIntegral(f"vertex {tuple(map(str, v.coords))} not integral")
            norm.append(Vertex(v.id, tuple(int(c) for c in v.coords), v.tight))
        H._vertices = norm
    return H._vertices


def face_lattice(H: HPolytope) -> FaceLattice:
    """All faces of a simple polytope, as subsets of vertex tight sets."""
    verts = compute_vertices(H)
    by_set = {}
    for v in verts:
        tight = sorted(v.tight)
        for r in range(len(tight) + 1):
            for sub in itertools.combinations(tight, r):
                by_set.setdefault(frozenset(sub), set()).add(v.id)
    faces = [
        Face(s, tuple(sorted(ids)))
        for s, ids in by_set.items()
    ]
    faces.sort(key=lambda f: (f.codim, sorted(f.index_set)))
    return FaceLattice(tuple(faces))


# ---------------------------------------------------------------------------
# Tangent cones and polarization
# ---------------------------------------------------------------------------

def edge_vectors(H: HPolytope, v: Vertex) -> dict:
    """Exact dual basis alpha_{i,v} to the tight normals at v."""
    ids = sorted(v.tight)
    rows = [H.normals[i] for i in ids]
    out = {}
    for pos, i in enumerate(ids):
        rhs = [Fraction(1) if j == pos else Fraction(0) for j in range(len(ids))]
        out[i] = tuple(solve_rational_system(rows, rhs))
    return out


def choose_polarizing_vector(H: HPolytope, seed: int = 0) -> PolarizingVector:
    """Random small integer covector with all edge pairings nonzero (exact)."""
    verts = compute_vertices(H)
    alphas = [edge_vectors(H, v) for v in verts]
    rng = random.Random(seed)
    for _ in range(1000):
        xi = tuple(rng.randint(-9, 9) for _ in range(H.dim))
        if all(
            dot(xi, a) != 0 for table in alphas for a in table.values()
        ) and any(c != 0 for c in xi):
            return PolarizingVector(xi)
    raise InternalError("could not find a generic polarizing vector")


def polarize(H: HPolytope, xi) -> list:
    """Polarized tangent cones at every vertex; flips where <xi, alpha> > 0."""
    if isinstance(xi, PolarizingVector):
        xi = xi.xi
    cones = []
    for v in compute_vertices(H):
        alpha = edge_vectors(H, v)
        flip = {}
        for i, a in alpha.items():
            p = dot(xi, a)
            if p == 0:
                raise NonGeneric(f"<xi, alpha_{i},{v.id}> = 0")
            flip[i] = -1 if p > 0 else 1
        normals = {i: H.normals[i] for i in v.tight}
        cones.append(
            PolarizedCone(v, tuple(sorted(v.tight)), alpha, normals, flip, tuple(xi))
        )
    return cones


def weighted_indicator(region, x) -> Fraction:
    """Weighted characteristic function: 2^{-codim} on faces, 0 outside."""
    x = [Fraction(c) for c in x]
    if isinstance(region, HPolytope):
        vals = [
            dot(u, x) + m for u, m in zip(region.normals, region.offsets)
        ]
    elif isinstance(region, PolarizedCone):
        v = region.vertex.coords
        diff = [a - b for a, b in zip(x, v)]
        vals = [dot(region.u_sharp(i), diff) for i in region.facet_ids]
    else:
        raise TypeError(f"unsupported region {type(region)!r}")
    if any(val < 0 for val in vals):
        return Fraction(0)
    k = sum(1 for val in vals if val == 0)
    return Fraction(1, 2**k)


def polar_decomposition_check(H: HPolytope, xi, points) -> bool:
    """Exact weighted Lawrence identity at each sample point."""
    cones = polarize(H, xi)
    for x in points:
        lhs = weighted_indicator(H, x)
        rhs = Fraction(0)
        for cone in cones:
            rhs += Fraction((-1) ** cone.flip_count) * weighted_indicator(cone, x)
        if lhs != rhs:
            raise DecompositionViolated(f"at point {tuple(map(str, x))}: {lhs} != {rhs}")
    return True


# ---------------------------------------------------------------------------
# Lattice enumeration oracle
# ---------------------------------------------------------------------------

def bounding_box(H: HPolytope):
    verts = compute_vertices(H)
    lo = [min(v.coords[j] for v in verts) for j in range(H.dim)]
    hi = [max(v.coords[j] for v in verts) for j in range(H.dim)]
    return lo, hi


def enumerate_lattice_points(H: HPolytope) -> list:
    """All lattice points of the polytope with their face codimension."""
    if H._lattice is not None:
        return H._lattice
    lo, hi = bounding_box(H)
    count = 1
    for a, b in zip(lo, hi):
        count *= b - a + 1
    if count > max_lattice_points():
        raise TooLarge(f"bounding box has {count} candidates > cap {max_lattice_points()}")
    pts = []
    for x in itertools.product(*(range(a, b + 1) for a, b in zip(lo, hi))):
        vals = [dot(u, x) + m for u, m in zip(H.normals, H.offsets)]
        if any(v < 0 for v in vals):
            continue
        codim = sum(1 for v in vals if v == 0)
        pts.append((x, codim))
    H._lattice = pts
    return pts


def weighted_sum_bruteforce(H: HPolytope, f):
    """Sum of 2^{-codim} f(x) over lattice points; exact for MultiPoly f."""
    pts = enumerate_lattice_points(H)
    if isinstance(f, MultiPoly):
        total = Fraction(0)
        for x, codim in pts:
            total += Fraction(1, 2**codim) * f.evaluate([Fraction(c) for c in x])
        return total
    total = 0.0
    for x, codim in pts:
        total += float(f(x)) / 2**codim
    return total


# ---------------------------------------------------------------------------
# Triangulation (pulling rule)
# ---------------------------------------------------------------------------

def triangulate(H: HPolytope) -> list:
    """Pulling triangulation into simplices on polytope vertices.

    Returns (vertex_id_tuple, orientation_sign) pairs; the sign makes the
    parallelepiped determinant of each simplex positive at h = 0.
    """
    verts = {v.id: v for v in compute_vertices(H)}
    lattice = face_lattice(H)
    simplices = [tuple(s) for s in _triangulate_face(lattice.faces[0], lattice, verts, H.dim)]
    out = []
    for s in simplices:
        v0 = verts[s[0]].coords
        rows = [[Fraction(verts[w].coords[j] - v0[j]) for j in range(H.dim)] for w in s[1:]]
        d = det_rational(rows)
        if d == 0:
            raise InternalError(f"degenerate simplex {s} in triangulation")
        out.append((s, 1 if d > 0 else -1))
    return out


def _triangulate_face(face: Face, lattice: FaceLattice, verts, n):
    dim = n - face.codim
    if len(face.vertex_ids) == dim + 1:
        return [list(face.vertex_ids)]
    pull = min(face.vertex_ids, key=lambda vid: verts[vid].coords)
    vset = set(face.vertex_ids)
    result = []
    for sub in lattice.faces:
        if sub.codim != face.codim + 1:
            continue
        if not face.index_set <= sub.index_set:
            continue
        if not set(sub.vertex_ids) <= vset:
            continue
        if pull in sub.vertex_ids:
            continue
        for simplex in _triangulate_face(sub, lattice, verts, n):
            result.append([pull] + simplex)
    return result


def simplex_volume(coords) -> Fraction:
    """|det| / n! volume of a simplex given by n+1 coordinate tuples."""
    v0 = coords[0]
    n = len(v0)
    rows = [[Fraction(c[j] - v0[j]) for j in range(n)] for c in coords[1:]]
    return abs(det_rational(rows)) / math.factorial(n)
