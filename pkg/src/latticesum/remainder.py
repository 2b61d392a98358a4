"""Numerical verification of the Euler-Maclaurin formula with remainder.

For smooth compactly supported functions the weighted lattice sum is compared
against the operator main term (computed cone by cone, which turns the
h-derivatives into honest integrals over polarized cones) plus the remainder
term, an explicit sum of quadratures of twisted periodic functions against
high-order directional derivatives.
"""

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import sympy as sp

from .bernoulli1d import M_poly, periodic_P_float, twisted_Q
from .errors import QuadratureFailure
from .exactnum import IntMatrix, RationalAngle, smith_normal_form, solve_rational_system
from .polytope import (
    HPolytope,
    PolarizedCone,
    choose_polarizing_vector,
    compute_vertices,
    dot,
    polarize,
    weighted_indicator,
)
from .quad import tensor_grid

# Piecewise guard: branches are switched a hair inside the support edge,
# where the bump and all derivatives up to the orders used here are far
# below double precision noise, so the guarded function is numerically C^oo.
_GUARD = sp.Rational(1, 256)


def _bump(u):
    """Standard bump exp(1/(u^2-1)) on |u| < 1, guarded for evaluation."""
    return sp.Piecewise((sp.exp(1 / (u**2 - 1)), u**2 < 1 - _GUARD), (0, True))


def _step(u):
    """Smooth transition: 0 for u <= 0, 1 for u >= 1."""
    a = sp.exp(-1 / u)
    b = sp.exp(-1 / (1 - u))
    return sp.Piecewise((0, u < _GUARD), (1, u > 1 - _GUARD), (a / (a + b), True))


class SmoothFunction:
    """Compactly supported smooth function with closed-form derivatives.

    Holds a sympy expression; mixed partials and directional derivatives are
    differentiated symbolically, lambdified once, and cached.
    """

    def __init__(self, dim: int, expr, support, label: str = ""):
        self.dim = dim
        self.expr = expr
        self.support = tuple((float(lo), float(hi)) for lo, hi in support)
        self.label = label
        self.syms = sp.symbols(f"x1:{dim + 1}")
        self._fns = {}

    def __repr__(self):
        return f"SmoothFunction({self.label or self.expr})"

    def _fn(self, key, expr):
        if key not in self._fns:
            self._fns[key] = sp.lambdify(self.syms, expr, modules="numpy")
        return self._fns[key]

    def _eval(self, key, expr, pts):
        pts = np.asarray(pts, dtype=float)
        single = pts.ndim == 1
        if single:
            pts = pts[None, :]
        fn = self._fn(key, expr)
        with np.errstate(all="ignore"):
            vals = fn(*[pts[:, i] for i in range(self.dim)])
        vals = np.broadcast_to(np.asarray(vals, dtype=float), (pts.shape[0],))
        return float(vals[0]) if single else np.array(vals)

    def __call__(self, pts):
        return self._eval((), self.expr, pts)

    def partial(self, orders):
        """Evaluator for the mixed partial d^orders f."""
        orders = tuple(int(a) for a in orders)
        expr = self.expr.diff(*[
            d for i, a in enumerate(orders) for d in (self.syms[i],) * a
        ]) if any(orders) else self.expr
        return lambda pts: self._eval(orders, expr, pts)

    def directional(self, spec):
        """Evaluator for prod_j (D_{v_j})^{p_j} f given ((v_j, p_j), ...)."""
        key = tuple((tuple(v), int(p)) for v, p in spec)
        expr = self.expr
        for vec, power in key:
            for _ in range(power):
                expr = sum(
                    sp.Rational(Fraction(c)) * expr.diff(s)
                    for c, s in zip(vec, self.syms)
                    if c != 0
                )
        return lambda pts: self._eval(("dir", key), expr, pts)


# ---------------------------------------------------------------------------
# Built-in families
# ---------------------------------------------------------------------------

def gaussian_bump(dim, center, radius, width=1.0) -> SmoothFunction:
    """exp(-|x-c|^2/w^2) cut off by a separable bump of the given radius."""
    x = sp.symbols(f"x1:{dim + 1}")
    expr = sp.exp(-sum(((x[i] - center[i]) / width) ** 2 for i in range(dim)))
    for i in range(dim):
        expr = expr * _bump((x[i] - center[i]) / radius)
    support = [(center[i] - radius, center[i] + radius) for i in range(dim)]
    return SmoothFunction(dim, expr, support, f"gaussian_bump(c={center}, r={radius})")


def poly_times_bump(dim, poly, center, radius) -> SmoothFunction:
    """Polynomial (sympy expression in x1..xn or string) times a bump."""
    x = sp.symbols(f"x1:{dim + 1}")
    expr = sp.sympify(poly, locals={f"x{i + 1}": x[i] for i in range(dim)})
    for i in range(dim):
        expr = expr * _bump((x[i] - center[i]) / radius)
    support = [(center[i] - radius, center[i] + radius) for i in range(dim)]
    return SmoothFunction(dim, expr, support, f"poly_times_bump({poly})")


def trig_times_bump(dim, freqs, center, radius) -> SmoothFunction:
    """cos(f . x) times a bump; oscillatory test case."""
    x = sp.symbols(f"x1:{dim + 1}")
    expr = sp.cos(sum(sp.Rational(Fraction(freqs[i])) * x[i] for i in range(dim)))
    for i in range(dim):
        expr = expr * _bump((x[i] - center[i]) / radius)
    support = [(center[i] - radius, center[i] + radius) for i in range(dim)]
    return SmoothFunction(dim, expr, support, f"trig_times_bump(f={freqs})")


def poly_times_plateau(dim, poly, lo, hi, margin=1.0) -> SmoothFunction:
    """Polynomial times a plateau cutoff which is identically 1 on [lo, hi].

    The cutoff falls smoothly to 0 across a collar of the given margin, so
    the product agrees with the bare polynomial on a neighborhood of the box.
    """
    x = sp.symbols(f"x1:{dim + 1}")
    expr = sp.sympify(poly, locals={f"x{i + 1}": x[i] for i in range(dim)})
    for i in range(dim):
        expr = expr * _step((x[i] - (lo[i] - margin)) / margin)
        expr = expr * _step(((hi[i] + margin) - x[i]) / margin)
    support = [(lo[i] - margin, hi[i] + margin) for i in range(dim)]
    return SmoothFunction(dim, expr, support, f"poly_times_plateau({poly})")


# ---------------------------------------------------------------------------
# Cone-side machinery
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConeQuadratureDomain:
    """Box [0, T_i] in the cone coordinates t_i = <u_i^#, x - v>."""

    cone: PolarizedCone
    bounds: tuple      # (0.0, T_i) per axis, axes in sorted facet order
    jacobian: int      # |Gamma_v| = |det of the normals at v|
    empty: bool


def cone_domain(C: PolarizedCone, f: SmoothFunction) -> ConeQuadratureDomain:
    """Smallest coordinate box containing the support of f inside the cone."""
    ids = list(C.facet_ids)
    v = C.vertex.coords
    jac = abs(IntMatrix([list(C.normals[i]) for i in ids]).det())
    corners = itertools.product(*[(lo, hi) for lo, hi in f.support])
    tmax = [0.0] * len(ids)
    for corner in corners:
        for pos, i in enumerate(ids):
            t = float(dot(C.u_sharp(i), [corner[j] - v[j] for j in range(len(v))]))
            tmax[pos] = max(tmax[pos], t)
    empty = any(t <= 0.0 for t in tmax)
    return ConeQuadratureDomain(C, tuple((0.0, t) for t in tmax), jac, empty)


def cone_group(C: PolarizedCone):
    """Representatives of Gamma = Z^n* / sum Z u_i for the cone's normals."""
    ids = list(C.facet_ids)
    n = len(ids)
    U = IntMatrix([list(C.normals[i]) for i in ids])
    P, D, Q = smith_normal_form(U)
    diag = [D[i, i] for i in range(n)]
    reps = []
    for word in itertools.product(*[range(d) for d in diag]):
        reps.append(tuple(
            sum(word[i] * Q[i, j] for i in range(n)) for j in range(n)
        ))
    return reps


def cone_angles(C: PolarizedCone, gamma) -> tuple:
    """Polarized angles lambda^#_{gamma,i} per axis, as RationalAngles."""
    ids = list(C.facet_ids)
    n = len(ids)
    cols = [[Fraction(C.normals[i][j]) for i in ids] for j in range(n)]
    b = solve_rational_system(cols, [Fraction(c) for c in gamma])
    out = []
    for pos, i in enumerate(ids):
        q = RationalAngle(b[pos] % 1)
        out.append(q.inverse() if C.flip[i] < 0 else q)
    return tuple(out)


def _coordinate_map(C: PolarizedCone):
    """Float matrix A with rows alpha_i^#, so x = v + t . A."""
    ids = list(C.facet_ids)
    A = np.array([[float(c) for c in C.alpha_sharp(i)] for i in ids])
    v = np.array([float(c) for c in C.vertex.coords])
    return v, A


def _q_eval(k: int, angle: RationalAngle, ts: np.ndarray) -> np.ndarray:
    if angle.is_one:
        return periodic_P_float(k, ts).astype(complex)
    return twisted_Q(k, angle).value_float(ts)


class _ConeQuadrature:
    """Shared quadrature grids for one cone/support pair."""

    _LEVELS = ((10, 1), (12, 2), (12, 4), (14, 8), (16, 12), (16, 20), (16, 32))

    def __init__(self, C: PolarizedCone, f: SmoothFunction):
        self.cone = C
        self.f = f
        self.dom = cone_domain(C, f)
        self.v, self.A = _coordinate_map(C)
        self._grids = {}
        self._derivs = {}       # (spec, level) -> derivative values on grid
        self._qvals = {}        # (k, angle, axis, level) -> Q values on grid
        self._deriv_integrals = {}  # spec -> (value, err)

    def grid(self, level):
        if level not in self._grids:
            order, split = level
            # Assemble in slabs along the first axis so refined grids never
            # materialize in full; points outside the support box are dropped
            # immediately (every integrand vanishes there).
            first, rest = self.dom.bounds[0], list(self.dom.bounds[1:])
            n1 = max(1, math.ceil(first[1] - first[0]))
            slab = max(1.0, (first[1] - first[0]) / n1)
            kept_t, kept_w, kept_x = [], [], []
            lo0 = first[0]
            while lo0 < first[1] - 1e-12:
                hi0 = min(lo0 + slab, first[1])
                tpts, wts = tensor_grid([(lo0, hi0)] + rest, order, split)
                xpts = self.v + tpts @ self.A
                inside = np.ones(len(tpts), dtype=bool)
                for i, (lo, hi) in enumerate(self.f.support):
                    inside &= (xpts[:, i] > lo) & (xpts[:, i] < hi)
                kept_t.append(tpts[inside])
                kept_w.append(wts[inside])
                kept_x.append(xpts[inside])
                lo0 = hi0
            self._grids[level] = (
                np.concatenate(kept_t),
                np.concatenate(kept_w),
                np.concatenate(kept_x),
            )
        return self._grids[level]

    def deriv_values(self, spec, level):
        """Directional-derivative values on a grid level, cached across callers."""
        key = (spec, level)
        if key not in self._derivs:
            dfun = self.f.directional(spec)
            self._derivs[key] = dfun(self.grid(level)[2])
        return self._derivs[key]

    def q_values(self, k, angle, axis, level):
        """Twisted periodic factor on one grid axis, cached."""
        key = (k, angle, axis, level)
        if key not in self._qvals:
            ts = self.grid(level)[0][:, axis]
            self._qvals[key] = _q_eval(k, angle, ts)
        return self._qvals[key]

    def integrate(self, values_at, tol):
        """Integral over the coordinate box, refined until the estimate settles.

        values_at(level) -> complex values on grid(level).
        """
        if self.dom.empty:
            return 0.0 + 0.0j, 0.0
        prev = None
        for level in self._LEVELS:
            tpts, wts, xpts = self.grid(level)
            if len(tpts) == 0:
                return 0.0 + 0.0j, 0.0
            val = complex(np.sum(wts * values_at(level)))
            if prev is not None:
                err = abs(val - prev)
                if err <= tol:
                    return val, err
            prev = val
        raise QuadratureFailure(
            f"cone integral stuck at error {err:.3e} > {tol:.3e} "
            f"(bounds {self.dom.bounds})"
        )

    def integrate_deriv(self, spec, tol):
        """Integral of one directional derivative, cached across gamma."""
        if spec not in self._deriv_integrals:
            self._deriv_integrals[spec] = self.integrate(
                lambda level: self.deriv_values(spec, level), tol
            )
        return self._deriv_integrals[spec]


def cone_weighted_sum(C: PolarizedCone, f: SmoothFunction) -> float:
    """Sum of 2^{-codim} f over lattice points of the polarized cone."""
    total = 0.0
    ranges = [
        range(math.floor(lo), math.ceil(hi) + 1) for lo, hi in f.support
    ]
    for pt in itertools.product(*ranges):
        w = weighted_indicator(C, tuple(Fraction(c) for c in pt))
        if w:
            total += float(w) * f(pt)
    return total


def _operator_exponents(C, gamma, k):
    """Coefficient of each derivative multi-exponent in prod_i M^{k,lambda_i}."""
    angles = cone_angles(C, gamma)
    polys = [M_poly(k, a) for a in angles]
    coeffs = {}
    ranges = [range(p.degree + 1) for p in polys]
    for m in itertools.product(*ranges):
        c = complex(1.0)
        for p, mi in zip(polys, m):
            c *= complex(p.coeff(mi).to_complex())
        if c != 0:
            coeffs[m] = c
    return coeffs


def cone_operator_part(C: PolarizedCone, gamma, f: SmoothFunction, k: int,
                       tol: float = 1e-8, _quad: "_ConeQuadrature" = None):
    """gamma's share of the operator side of the one-cone formula.

    Each (d/dh_i)^m factor is converted to an integral of (-D_{alpha_i})^m f
    over the cone; the 1/|Gamma| average is folded in so that summing over
    all gamma in the cone group gives the full operator term.
    """
    quad = _quad or _ConeQuadrature(C, f)
    if quad.dom.empty:
        return 0.0 + 0.0j, 0.0
    ids = list(C.facet_ids)
    total = 0.0 + 0.0j
    err = 0.0
    for m, coeff in _operator_exponents(C, gamma, k).items():
        spec = tuple(
            (C.alpha_sharp(i), mi) for i, mi in zip(ids, m) if mi
        )
        sign = (-1) ** sum(m)
        val, e = quad.integrate_deriv(spec, tol)
        total += coeff * sign * val / quad.dom.jacobian
        err += abs(coeff) * e / quad.dom.jacobian
    return total, err


def cone_remainder(C: PolarizedCone, gamma, f: SmoothFunction, k: int,
                   tol: float = 1e-8, _quad: "_ConeQuadrature" = None):
    """gamma's share of the one-cone remainder.

    Sum over proper subsets I of the axes: operators M^{k,lambda_i}(-d/dt_i)
    on I, twisted periodic factors Q_{k,lambda_i}(t_i) and k-th derivatives
    off I, integrated over the cone box.
    """
    quad = _quad or _ConeQuadrature(C, f)
    if quad.dom.empty:
        return 0.0 + 0.0j, 0.0
    ids = list(C.facet_ids)
    n = len(ids)
    angles = cone_angles(C, gamma)
    polys = [M_poly(k, a) for a in angles]
    total = 0.0 + 0.0j
    err = 0.0
    for inside in itertools.chain.from_iterable(
        itertools.combinations(range(n), r) for r in range(n)
    ):
        outside = [i for i in range(n) if i not in inside]
        sign = (-1) ** ((k - 1) * len(outside))
        ranges = [range(polys[i].degree + 1) for i in inside]
        for m in itertools.product(*ranges):
            coeff = complex(1.0)
            for pos, mi in zip(inside, m):
                # M^{k,lambda}(-d/dt) flips the sign of odd coefficients.
                coeff *= complex(polys[pos].coeff(mi).to_complex()) * (-1) ** mi
            if coeff == 0:
                continue
            orders = [0] * n
            for pos, mi in zip(inside, m):
                orders[pos] = mi
            for pos in outside:
                orders[pos] = k
            spec = tuple(
                (C.alpha_sharp(ids[pos]), orders[pos])
                for pos in range(n) if orders[pos]
            )

            def values_at(level, outside=outside, spec=spec):
                vals = quad.deriv_values(spec, level).astype(complex)
                for pos in outside:
                    vals = vals * quad.q_values(k, angles[pos], pos, level)
                return vals

            val, e = quad.integrate(values_at, tol)
            total += sign * coeff * val / quad.dom.jacobian
            err += abs(coeff) * e / quad.dom.jacobian
    return total, err


# ---------------------------------------------------------------------------
# Whole-polytope verification
# ---------------------------------------------------------------------------

def polytope_remainder(H: HPolytope, xi, f: SmoothFunction, k: int,
                       tol: float = 1e-8):
    """R_k^Delta(f) = sum over vertices of (-1)^{#v} R_k^{cone}(f)."""
    total = 0.0 + 0.0j
    err = 0.0
    for C in polarize(H, xi):
        quad = _ConeQuadrature(C, f)
        sign = (-1) ** C.flip_count
        for gamma in cone_group(C):
            val, e = cone_remainder(C, gamma, f, k, tol, _quad=quad)
            total += sign * val
            err += e
    return total.real, err


def polytope_main_term(H: HPolytope, xi, f: SmoothFunction, k: int,
                       tol: float = 1e-8):
    """Operator side of the main theorem, in the polarized-cone grouping."""
    total = 0.0 + 0.0j
    err = 0.0
    for C in polarize(H, xi):
        quad = _ConeQuadrature(C, f)
        sign = (-1) ** C.flip_count
        for gamma in cone_group(C):
            val, e = cone_operator_part(C, gamma, f, k, tol, _quad=quad)
            total += sign * val
            err += e
    return total.real, err


def weighted_sum_smooth(H: HPolytope, f: SmoothFunction) -> float:
    """Direct weighted lattice sum of f over the polytope."""
    from .polytope import weighted_sum_bruteforce

    return float(weighted_sum_bruteforce(H, f))


@dataclass(frozen=True)
class Report:
    lhs: float
    main_term: float
    remainder: float
    defect: float
    quad_error_estimate: float
    seed: int
    k: int

    def to_json(self) -> dict:
        return {
            "lhs": self.lhs,
            "main_term": self.main_term,
            "remainder": self.remainder,
            "defect": self.defect,
            "quad_error_estimate": self.quad_error_estimate,
            "seed": self.seed,
            "k": self.k,
        }


def verify_main_theorem(H: HPolytope, f: SmoothFunction, k: int,
                        seeds=(0,), tol: float = 1e-8) -> list:
    """Check sum' f = main term + remainder, once per polarization seed."""
    lhs = weighted_sum_smooth(H, f)
    reports = []
    for seed in seeds:
        xi = choose_polarizing_vector(H, seed)
        main, e1 = polytope_main_term(H, xi, f, k, tol)
        rem, e2 = polytope_remainder(H, xi, f, k, tol)
        reports.append(Report(
            lhs=lhs,
            main_term=main,
            remainder=rem,
            defect=abs(lhs - main - rem),
            quad_error_estimate=e1 + e2,
            seed=seed,
            k=k,
        ))
    return reports
