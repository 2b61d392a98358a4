"""Exact Euler-Maclaurin evaluation for polynomials over simple integral polytopes.

The pieces assembled here: finite abelian groups attached to faces and their
"flat" subsets, rational character angles, the symbolic integral over the
dilated polytope, and the differential-operator products that tie them into
an exact formula for weighted lattice sums of polynomials.
"""

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .bernoulli1d import L_truncated, M_poly
from .errors import (
    ClaimViolated,
    InternalError,
    NotInjective,
    NotRegular,
    PartitionViolated,
)
from .exactnum import (
    CyclotomicNumber,
    IntMatrix,
    RationalAngle,
    rational_part,
    smith_normal_form,
    solve_rational_system,
)
from .multipoly import MultiPoly
from .polytope import (
    Face,
    HPolytope,
    compute_vertices,
    edge_vectors,
    face_lattice,
    triangulate,
)

ANGLE_ZERO = RationalAngle(Fraction(0))


# ---------------------------------------------------------------------------
# Face groups
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FaceGroup:
    """Quotient (N_F intersect Z^n*) / sum Z u_i attached to a face.

    Coset representatives are indexed by "words": tuples w with
    0 <= w_i < diag_i, where diag is the Smith diagonal of the matrix
    expressing the normals u_i in a basis of the saturated lattice.
    """

    face: Face
    dim: int             # ambient dimension n
    order: int
    diag: tuple          # Smith diagonal entries of the coordinate matrix
    sat_basis: tuple     # rows: Z-basis of N_F intersect Z^n*
    _qrows: tuple        # rows of the Smith Q factor (word -> coordinates)
    _qinv: tuple         # integer inverse of the Q factor

    @property
    def words(self):
        return list(itertools.product(*[range(di) for di in self.diag]))

    def rep(self, word) -> tuple:
        """Integer covector representing the coset indexed by `word`."""
        c = len(self.diag)
        z = [sum(word[i] * self._qrows[i][j] for i in range(c)) for j in range(c)]
        return tuple(
            sum(z[i] * self.sat_basis[i][j] for i in range(c))
            for j in range(self.dim)
        )

    def reps(self):
        return [self.rep(w) for w in self.words]

    def word_of(self, covector) -> tuple:
        """Canonical word of an integer covector lying in N_F intersect Z^n*."""
        c = len(self.diag)
        if c == 0:
            return ()
        z = _coordinates_in_basis(self.sat_basis, covector)
        w = [
            sum(z[i] * self._qinv[i][j] for i in range(c)) % self.diag[j]
            for j in range(c)
        ]
        return tuple(w)


def _coordinates_in_basis(basis, covector):
    """Integer coordinates of `covector` in the lattice basis `basis` (rows)."""
    c = len(basis)
    n = len(covector)
    # Solve z . B = covector through the (nonsingular) Gram matrix B B^T.
    gram = [
        [Fraction(sum(basis[i][t] * basis[j][t] for t in range(n))) for i in range(c)]
        for j in range(c)
    ]
    rhs = [Fraction(sum(covector[t] * basis[j][t] for t in range(n))) for j in range(c)]
    z = solve_rational_system(gram, rhs)
    if any(q.denominator != 1 for q in z):
        raise InternalError(f"covector {covector} is not in the saturated lattice")
    zi = [int(q) for q in z]
    if any(
        sum(zi[i] * basis[i][j] for i in range(c)) != covector[j] for j in range(n)
    ):
        raise InternalError(f"covector {covector} left the span of the saturation")
    return zi


def _integer_inverse(rows):
    """Exact inverse of a unimodular integer matrix, as integer rows."""
    c = len(rows)
    cols = []
    for j in range(c):
        e = [Fraction(1) if i == j else Fraction(0) for i in range(c)]
        cols.append(solve_rational_system(rows, e))
    inv = [[cols[j][i] for j in range(c)] for i in range(c)]
    if any(q.denominator != 1 for row in inv for q in row):
        raise InternalError("matrix is not unimodular")
    return tuple(tuple(int(q) for q in row) for row in inv)


def face_group(H: HPolytope, F: Face) -> FaceGroup:
    """Group of the face F, built from two Smith normal forms."""
    ids = sorted(F.index_set)
    c = len(ids)
    if c == 0:
        return FaceGroup(F, H.dim, 1, (), (), (), ())
    U = IntMatrix([list(H.normals[i]) for i in ids])
    P, D, Q = smith_normal_form(U)
    # First c rows of Q span the saturation of the row space of U.
    sat = tuple(tuple(Q[i, j] for j in range(H.dim)) for i in range(c))
    # Coordinates of the u_i in that basis: A = P . diag(d_1..d_c).
    A = IntMatrix([[P[i, j] * D[j, j] for j in range(c)] for i in range(c)])
    P2, D2, Q2 = smith_normal_form(A)
    diag = tuple(D2[i, i] for i in range(c))
    if any(d <= 0 for d in diag):
        raise InternalError(f"face normals {ids} are linearly dependent")
    qrows = tuple(tuple(Q2[i, j] for j in range(c)) for i in range(c))
    order = math.prod(diag)
    return FaceGroup(F, H.dim, order, diag, sat, qrows, _integer_inverse(qrows))


def inclusion_map(groupE: FaceGroup, groupF: FaceGroup) -> dict:
    """Natural injection Gamma_E -> Gamma_F for faces F contained in E.

    Returned as a map from words of Gamma_E to words of Gamma_F.
    """
    if not groupE.face.index_set <= groupF.face.index_set:
        raise InternalError("inclusion_map requires I_E to be a subset of I_F")
    out = {w: groupF.word_of(groupE.rep(w)) for w in groupE.words}
    if len(set(out.values())) != groupE.order:
        raise NotInjective(
            f"Gamma_{sorted(groupE.face.index_set)} does not inject into "
            f"Gamma_{sorted(groupF.face.index_set)}"
        )
    return out


@dataclass(frozen=True)
class FlatSubset:
    """Members of Gamma_F surviving removal of all strictly larger faces' groups."""

    face: Face
    members: tuple  # words of the parent FaceGroup


def flat_subsets(H: HPolytope):
    """Map face index set -> FlatSubset, with the vertex partition asserted."""
    ctx = _context(H)
    return ctx.flats


@dataclass(frozen=True)
class CharacterData:
    """Angles q_{gamma,j} with lambda_{gamma,j,F} = e^{2 pi i q_{gamma,j}}."""

    face: Face
    word: tuple
    angles: tuple  # one RationalAngle per facet j = 0..d-1


def character_angles(H: HPolytope, F: Face, covector) -> tuple:
    """Angles of the character attached to a group element, one per facet.

    Solves gamma~ = sum b_i u_i at every vertex of F and checks that the
    answers agree (they must, by the structure of the dual bases) and that
    the angles vanish off I_F.
    """
    verts = {v.id: v for v in compute_vertices(H)}
    d = H.num_facets
    result = None
    for vid in F.vertex_ids:
        v = verts[vid]
        ids = sorted(v.tight)
        # b . U = gamma~  with U the rows u_i, i in I_v.
        cols = [[Fraction(H.normals[i][j]) for i in ids] for j in range(H.dim)]
        b = solve_rational_system(cols, [Fraction(c) for c in covector])
        angles = [ANGLE_ZERO] * d
        for pos, i in enumerate(ids):
            if i in F.index_set:
                angles[i] = RationalAngle(b[pos] % 1)
            elif b[pos].denominator != 1:
                raise ClaimViolated(
                    f"angle at facet {i} (off I_F) is {b[pos]} mod 1 != 0 "
                    f"for gamma={covector} at vertex {vid}"
                )
        angles = tuple(angles)
        if result is None:
            result = angles
        elif result != angles:
            raise ClaimViolated(
                f"character of gamma={covector} depends on the vertex of F="
                f"{sorted(F.index_set)}: {result} vs {angles}"
            )
    if result is None:
        raise InternalError("face has no vertices")
    return result


# ---------------------------------------------------------------------------
# Symbolic integral over the dilated polytope
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DilationPolynomial:
    """I(h) = integral of p over Delta(h), exact in the dilation parameters."""

    num_facets: int
    poly: MultiPoly  # in variables h_1..h_d
    degree_bound: int

    def at_zero(self) -> Fraction:
        return self.poly.coefficient((0,) * self.num_facets)

    def coefficient(self, exponents) -> Fraction:
        return self.poly.coefficient(exponents)


def dilation_integral_poly(H: HPolytope, p: MultiPoly) -> DilationPolynomial:
    """Integrate p over the dilated polytope symbolically.

    Each simplex of a triangulation of Delta is tracked as its facets move:
    a vertex tight on facets I_v slides affinely, v(h) = v - sum h_i alpha_i.
    Pulling the moving simplex back to the standard simplex turns the
    integral into the factorial formula for monomials.
    """
    n, d = H.dim, H.num_facets
    nv = n + d  # variables: s_1..s_n then h_1..h_d
    verts = {v.id: v for v in compute_vertices(H)}
    alphas = {v.id: edge_vectors(H, v) for v in verts.values()}

    def moving_vertex(vid):
        """Coordinates of v(h) as polynomials in (s, h)."""
        v = verts[vid]
        out = []
        for j in range(n):
            q = MultiPoly.constant(nv, v.coords[j])
            for i in sorted(v.tight):
                q = q - MultiPoly.variable(nv, n + i) * alphas[vid][i][j]
            out.append(q)
        return out

    total = MultiPoly.constant(nv, 0)
    for simplex, sign in triangulate(H):
        corners = [moving_vertex(vid) for vid in simplex]
        edges = [
            [corners[j + 1][t] - corners[0][t] for t in range(n)]
            for j in range(n)
        ]
        jac = _poly_det(edges, nv) * sign
        image = [
            corners[0][t]
            + sum(
                (MultiPoly.variable(nv, j) * edges[j][t] for j in range(n)),
                MultiPoly.constant(nv, 0),
            )
            for t in range(n)
        ]
        lifted = MultiPoly(
            nv, {e + (0,) * d: c for e, c in p.terms.items()}
        )
        total = total + lifted.substitute(image + [MultiPoly.variable(nv, n + i) for i in range(d)]) * jac

    # Integrate the simplex variables out with the factorial formula.
    result = {}
    for expo, coeff in total.terms.items():
        a, he = expo[:n], expo[n:]
        num = math.prod(math.factorial(ai) for ai in a)
        weight = Fraction(num, math.factorial(n + sum(a)))
        result[he] = result.get(he, Fraction(0)) + coeff * weight
    poly = MultiPoly(d, result)
    return DilationPolynomial(d, poly, n + p.degree())


def _poly_det(rows, nv):
    """Determinant of a square matrix of polynomials, by Laplace expansion."""
    m = len(rows)
    if m == 1:
        return rows[0][0]
    out = MultiPoly.constant(nv, 0)
    for j in range(m):
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        term = rows[0][j] * _poly_det(minor, nv)
        out = out + (term if j % 2 == 0 else -term)
    return out


# ---------------------------------------------------------------------------
# Operators
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AssembledOperator:
    """Product over facets of M^{k,lambda_j}(d/dh_j), expanded.

    `terms` maps exponent vectors a (one entry per facet) to cyclotomic
    coefficients of the monomial prod (d/dh_j)^{a_j}.
    """

    k: int
    num_facets: int
    terms: dict


def assemble_operator(angles, k: int, degree_caps=None) -> AssembledOperator:
    """Expand prod_j M^{k,lambda_j}(d/dh_j) over exponent vectors.

    `degree_caps[j]` prunes powers of d/dh_j that would annihilate the
    target polynomial anyway.
    """
    d = len(angles)
    terms = {(): CyclotomicNumber.one()}
    for j in range(d):
        factor = M_poly(k, angles[j])
        cap = factor.degree
        if degree_caps is not None:
            cap = min(cap, degree_caps[j])
        new = {}
        for m in range(cap + 1):
            cm = factor.coeff(m)
            if cm.is_zero():
                continue
            for expo, coeff in terms.items():
                new[expo + (m,)] = coeff * cm
        terms = new
    return AssembledOperator(k, d, terms)


def apply_operator(A: AssembledOperator, I: DilationPolynomial) -> CyclotomicNumber:
    """Evaluate (A I)(0): each d^a/dh^a picks the h^a coefficient times a!."""
    total = CyclotomicNumber.zero()
    for expo, coeff in A.terms.items():
        c = I.coefficient(expo)
        if c == 0:
            continue
        total = total + coeff * (c * math.prod(math.factorial(a) for a in expo))
    return total


# ---------------------------------------------------------------------------
# Cached per-polytope context
# ---------------------------------------------------------------------------

class EmContext:
    """Face lattice, groups, flat subsets and characters of one polytope."""

    def __init__(self, H: HPolytope):
        self.H = H
        self.lattice = face_lattice(H)
        self.by_index = {f.index_set: f for f in self.lattice.faces}
        self.groups = {f.index_set: face_group(H, f) for f in self.lattice.faces}
        self.flats = self._flat_subsets()
        self._angles = {}
        self._integrals = {}

    def _flat_subsets(self):
        flats = {}
        for f in self.lattice.faces:
            group = self.groups[f.index_set]
            survivors = set(group.words)
            for i in f.index_set:
                sub = f.index_set - {i}
                if sub not in self.by_index:
                    raise InternalError(
                        f"missing face for index set {sorted(sub)}; "
                        "polytope is not simple"
                    )
                image = inclusion_map(self.groups[sub], group)
                survivors -= set(image.values())
            flats[f.index_set] = FlatSubset(f, tuple(sorted(survivors)))
        # Disjoint-union property at every vertex.
        for v in self.lattice.by_codim(self.H.dim):
            total = sum(
                len(flats[frozenset(sub)].members)
                for r in range(len(v.index_set) + 1)
                for sub in itertools.combinations(sorted(v.index_set), r)
            )
            if total != self.groups[v.index_set].order:
                raise PartitionViolated(
                    f"flat subsets at vertex {sorted(v.index_set)} sum to "
                    f"{total}, group order is {self.groups[v.index_set].order}"
                )
        return flats

    def angles(self, face: Face, word) -> tuple:
        key = (face.index_set, word)
        if key not in self._angles:
            rep = self.groups[face.index_set].rep(word)
            self._angles[key] = character_angles(self.H, face, rep)
        return self._angles[key]

    def integral(self, p: MultiPoly) -> DilationPolynomial:
        if p not in self._integrals:
            self._integrals[p] = dilation_integral_poly(self.H, p)
        return self._integrals[p]


_CONTEXTS = {}


def _context(H: HPolytope) -> EmContext:
    key = (H.normals, H.offsets)
    if key not in _CONTEXTS:
        _CONTEXTS[key] = EmContext(H)
    return _CONTEXTS[key]


# ---------------------------------------------------------------------------
# Weighted sums
# ---------------------------------------------------------------------------

def weighted_sum_polynomial(H: HPolytope, p: MultiPoly, k: int = None) -> Fraction:
    """Exact weighted lattice sum of p over the polytope.

    Sums apply_operator over all faces and all flat group elements; the
    grand total lies in a cyclotomic field but is provably rational.
    """
    ctx = _context(H)
    if k is None:
        k = p.degree() + H.dim + 1
    I = ctx.integral(p)
    caps = [I.poly.degree_in(j) for j in range(H.num_facets)]
    total = CyclotomicNumber.zero()
    for index_set, flat in ctx.flats.items():
        face = ctx.by_index[index_set]
        for word in flat.members:
            op = assemble_operator(ctx.angles(face, word), k, caps)
            total = total + apply_operator(op, I)
    return rational_part(total)


def weighted_sum_regular(H: HPolytope, p: MultiPoly, k: int = None) -> Fraction:
    """Weighted sum via the single-operator formula for regular polytopes."""
    ctx = _context(H)
    for v in ctx.lattice.by_codim(H.dim):
        order = ctx.groups[v.index_set].order
        if order != 1:
            raise NotRegular(
                f"vertex {sorted(v.index_set)} has group order {order}"
            )
    if k is None:
        k = p.degree() + H.dim + 1
    I = ctx.integral(p)
    caps = [I.poly.degree_in(j) for j in range(H.num_facets)]
    L = L_truncated(k // 2)
    total = Fraction(0)
    ddim = H.num_facets
    ranges = [range(min(L.degree, caps[j]) + 1) for j in range(ddim)]
    for expo in itertools.product(*ranges):
        coeff = Fraction(1)
        for m in expo:
            cm = L.coeff(m)
            if cm.is_zero():
                coeff = Fraction(0)
                break
            coeff *= cm.rational_part()
        if coeff == 0:
            continue
        c = I.coefficient(expo)
        if c:
            total += coeff * c * math.prod(math.factorial(a) for a in expo)
    return total
