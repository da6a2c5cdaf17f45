"""Monomial-level associated graded structure of cone and monoid algebras:
truncation products, retract/nilpotent classification, polyhedral-algebra
products, and monoids from regular triangulations with support data."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations_with_replacement
from math import gcd

from . import dd
from .bottomcx import EmbeddedComplex, bottom_complex, verify_reduced_bottom
from .cone import Cone, build_cone
from .disc import AbstractSimplicialComplex
from .errors import (
    InputError,
    NotAMonomial,
    NotInCone,
    NotInMonoid,
    NotSupporting,
)
from .exactlin import IntVec, dot, is_zero, mat, solve, vadd, vec, vsub
from .monoid import DecompositionOracle, cone_points_up_to_height, hilbert_basis


class _GrZero:
    """The zero of the associated graded ring (absorbing product marker)."""

    __slots__ = ()

    def __repr__(self):
        return "GR_ZERO"

    def __bool__(self):
        return False


GR_ZERO = _GrZero()


@dataclass(frozen=True)
class GrMonomial:
    point: IntVec
    length: int


@dataclass(frozen=True)
class MonoidPresentation:
    """A positive affine monoid given by generators (not assumed normal)."""

    ambient_dim: int
    generators: tuple[IntVec, ...]
    normal: bool
    generator_of: dict = field(default_factory=dict, compare=False)


class GrRing:
    """Monomial arithmetic of gr(k[M]) for the monoid generated by gens."""

    def __init__(self, gens):
        self.oracle = DecompositionOracle(gens)
        self.gens = self.oracle.gens

    def monomial(self, point) -> GrMonomial:
        return GrMonomial(point=vec(point), length=self.oracle.length(point))

    def product(self, m1, m2):
        m1 = m1 if isinstance(m1, GrMonomial) else self.monomial(m1)
        m2 = m2 if isinstance(m2, GrMonomial) else self.monomial(m2)
        total = vadd(m1.point, m2.point)
        l = self.oracle.length(total)
        if l == m1.length + m2.length:
            return GrMonomial(point=total, length=l)
        return GR_ZERO

    def power_is_zero(self, m, t: int) -> bool:
        m = m if isinstance(m, GrMonomial) else self.monomial(m)
        scaled = tuple(t * x for x in m.point)
        return self.oracle.length(scaled) != t * m.length


def gr_product(gens, m1, m2):
    """Product in the associated graded ring: the sum when the lengths add,
    the zero marker when the sum decomposes longer."""
    return GrRing(gens).product(m1, m2)


# ---------------------------------------------------------------------------
# Retract monomials of a cone's graded ring
# ---------------------------------------------------------------------------


def _facet_monoid_oracles(cone: Cone):
    bc = bottom_complex(cone)
    out = []
    for f in bc.facets:
        pts = bc.facet_points(f)
        lattice = dd.lattice_points_of_polytope(pts)
        out.append((pts, lattice, DecompositionOracle(lattice)))
    return bc, out


def is_retract_monomial(cone: Cone, m) -> bool:
    """Does m decompose over the lattice points of one bottom facet?"""
    m = vec(m)
    if not cone.contains(m):
        raise NotInCone(f"{m} is not in the cone")
    if is_zero(m):
        raise NotInCone("the zero monomial is excluded")
    _bc, oracles = _facet_monoid_oracles(cone)
    return any(oracle.contains(m) for _pts, _lat, oracle in oracles)


# ---------------------------------------------------------------------------
# Polyhedral algebra monomials
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PolyMonomial:
    """A monomial of the polyhedral algebra: a sum of `degree` lattice
    points of the carrying face."""

    point: IntVec
    degree: int
    face: frozenset


def _exact_count_decomposition(points, target, count) -> bool:
    pts = sorted(set(points))
    zero = (0,) * len(target)
    memo = {}

    def rec(t, c, start):
        if c == 0:
            return t == zero
        key = (t, c, start)
        if key in memo:
            return memo[key]
        ok = False
        for idx in range(start, len(pts)):
            ok = rec(vsub(t, pts[idx]), c - 1, idx)
            if ok:
                break
        memo[key] = ok
        return ok

    return rec(vec(target), count, 0)


def monomial_on_face(k: EmbeddedComplex, face_points, point, degree) -> PolyMonomial:
    """Validated monomial of M(face): point must be a sum of exactly
    `degree` lattice points of the face."""
    face_points = tuple(sorted(vec(p) for p in face_points))
    lattice = dd.lattice_points_of_polytope(face_points)
    if degree < 1 or not _exact_count_decomposition(lattice, point, degree):
        raise NotAMonomial(
            f"{point} is not a sum of {degree} lattice points of the face"
        )
    return PolyMonomial(point=vec(point), degree=degree, face=frozenset(face_points))


def _support_face(k: EmbeddedComplex, m: PolyMonomial) -> frozenset:
    """Smallest face of the carrying polytope whose monoid contains m."""
    pts = tuple(sorted(m.face))
    hrep = dd.polytope_hrep(pts)
    verts = set(dd.hull_vertices(pts))
    current = set(verts)
    for a, c in hrep.inequalities:
        if dot(a, m.point) == c * m.degree:
            current &= {v for v in verts if dot(a, v) == c}
    return frozenset(current)


def polyhedral_monomial_product(k: EmbeddedComplex, m1: PolyMonomial, m2: PolyMonomial):
    """Product in the polyhedral algebra of the complex: carried on the
    minimal common face of the supports, or the zero marker."""
    s1 = _support_face(k, m1)
    s2 = _support_face(k, m2)
    union = s1 | s2
    candidates = [f for f in k.faces() if union <= f]
    if not candidates:
        return GR_ZERO
    minimal = candidates[0]
    for f in candidates[1:]:
        minimal = minimal & f
    point = vadd(m1.point, m2.point)
    degree = m1.degree + m2.degree
    lattice = dd.lattice_points_of_polytope(tuple(minimal))
    assert _exact_count_decomposition(lattice, point, degree)
    return PolyMonomial(point=point, degree=degree, face=frozenset(minimal))


# ---------------------------------------------------------------------------
# Agreement of gr with the bottom algebra
# ---------------------------------------------------------------------------


@dataclass
class GrCheckReport:
    height_bound: int
    reduced_bottom: bool
    monomials: int
    retract: list
    nilpotent: list
    mismatches: list

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def to_json(self):
        return {
            "height_bound": self.height_bound,
            "reduced_bottom": self.reduced_bottom,
            "monomials": self.monomials,
            "retract": [list(m) for m in self.retract],
            "nilpotent": [list(m) for m in self.nilpotent],
            "mismatches": self.mismatches,
            "ok": self.ok,
        }


def gr_matches_bottom_algebra(
    cone: Cone, height_bound: int, nilpotency_power: int = 6, retract_power: int = 8
) -> GrCheckReport:
    """Monomial-level agreement between gr(k[C /\\ Z^d]) and the polyhedral
    algebra of the bottom complex, over all monomials up to the height
    bound (canonical positive grading)."""
    ring = GrRing(hilbert_basis(cone).elements)
    bc, facet_oracles = _facet_monoid_oracles(cone)
    reduced = verify_reduced_bottom(bc).ok
    points = cone_points_up_to_height(cone, height_bound)
    retract = []
    nilpotent = []
    mismatches = []
    supports = {}
    for m in points:
        carried = [pts for pts, _lat, oracle in facet_oracles if oracle.contains(m)]
        mono = ring.monomial(m)
        if carried:
            retract.append(m)
            supports[m] = carried
            if any(ring.power_is_zero(mono, t) for t in range(2, nilpotency_power + 1)):
                mismatches.append(
                    {"check": "retract-collapse", "monomial": list(m)}
                )
        else:
            nilpotent.append(m)
            if not any(ring.power_is_zero(mono, t) for t in range(2, nilpotency_power + 1)):
                mismatches.append(
                    {"check": "non-retract-not-nilpotent", "monomial": list(m)}
                )
            scaled = [tuple(t * x for x in m) for t in range(1, retract_power + 1)]
            if not any(
                any(oracle.contains(s) for _p, _l, oracle in facet_oracles)
                for s in scaled
            ):
                mismatches.append(
                    {"check": "no-power-in-retract", "monomial": list(m)}
                )
    for a_i in range(len(retract)):
        for b_i in range(a_i, len(retract)):
            a, b = retract[a_i], retract[b_i]
            ma, mb = ring.monomial(a), ring.monomial(b)
            pa = monomial_on_face(bc, supports[a][0], a, ma.length)
            pb = monomial_on_face(bc, supports[b][0], b, mb.length)
            poly = polyhedral_monomial_product(bc, pa, pb)
            grp = ring.product(ma, mb)
            if (poly is GR_ZERO) != (grp is GR_ZERO):
                mismatches.append(
                    {
                        "check": "product-mismatch",
                        "monomials": [list(a), list(b)],
                        "gr_zero": grp is GR_ZERO,
                        "polyhedral_zero": poly is GR_ZERO,
                    }
                )
            if reduced and grp is GR_ZERO:
                shared = any(
                    oracle.contains(a) and oracle.contains(b)
                    for _p, _l, oracle in facet_oracles
                )
                if shared:
                    mismatches.append(
                        {
                            "check": "same-facet-collapse",
                            "monomials": [list(a), list(b)],
                        }
                    )
    return GrCheckReport(
        height_bound=height_bound,
        reduced_bottom=reduced,
        monomials=len(points),
        retract=retract,
        nilpotent=nilpotent,
        mismatches=mismatches,
    )


# ---------------------------------------------------------------------------
# Monoids from regular triangulations with support data
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Triangulation:
    """A geometric simplicial complex with rational vertices."""

    dim: int
    vertices: dict  # id -> tuple[Fraction]
    facets: tuple[tuple[str, ...], ...]

    def facet_points(self, f):
        return [self.vertices[v] for v in f]


def _affine_extension_value(points, values, at):
    """Value at `at` of the affine function interpolating (points, values)."""
    d = len(at)
    rows = [tuple(p) + (1,) for p in points]
    sol = solve(rows, values)
    if sol is None:
        raise InputError("panel vertices are affinely dependent")
    return sum(Fraction(sol[i]) * at[i] for i in range(d)) + sol[d]


def regular_to_monoid(tri: Triangulation, support, scale: int | None = None):
    """Monoid generated by the vertices of the scaled projective transform
    of the support graph.

    The support values must be strictly positive and strictly concave
    across every interior wall (the tent orientation, which the transform
    sends to a ball convex towards the origin); NotSupporting otherwise.
    Each vertex p with value f maps to (p/f, 1/f), scaled to the lattice.
    """
    f = {v: Fraction(support[v]) for v in tri.vertices}
    if any(val <= 0 for val in f.values()):
        raise NotSupporting("support values must be strictly positive")
    walls: dict[frozenset, list] = {}
    for facet in tri.facets:
        for drop in facet:
            wall = frozenset(v for v in facet if v != drop)
            walls.setdefault(wall, []).append((facet, drop))
    for wall, panels in walls.items():
        if len(panels) > 2:
            raise NotSupporting("a wall is shared by more than two panels")
        if len(panels) != 2:
            continue
        (f1, _), (f2, opp2) = panels
        ext = _affine_extension_value(
            tri.facet_points(f1), [f[v] for v in f1], tri.vertices[opp2]
        )
        if not f[opp2] < ext:
            raise NotSupporting(
                f"support is not strictly concave across the wall {sorted(wall)}"
            )
    transformed = {
        v: tuple(x / f[v] for x in tri.vertices[v]) + (1 / f[v],) for v in tri.vertices
    }
    if scale is None:
        k = 1
        for w in transformed.values():
            for x in w:
                k = k * x.denominator // gcd(k, x.denominator)
        scale = k
    gens = {}
    for v, w in transformed.items():
        g = tuple(x * scale for x in w)
        if any(x.denominator != 1 for x in g):
            raise InputError(f"scale {scale} does not clear the denominators")
        gens[v] = tuple(int(x) for x in g)
    cone = build_cone(list(gens.values()))
    oracle = DecompositionOracle(list(gens.values()))
    normal = all(oracle.contains(h) for h in hilbert_basis(cone).elements)
    return MonoidPresentation(
        ambient_dim=tri.dim + 1,
        generators=tuple(sorted(set(gens.values()))),
        normal=normal,
        generator_of=gens,
    )


def compare_gr_with_stanley_reisner(
    pres: MonoidPresentation,
    abstract: AbstractSimplicialComplex,
    labels: dict,
    degree_bound: int,
):
    """Check gr(k[M]) against the face ring of the abstract complex up to
    the degree bound.

    labels maps abstract vertices to generators.  A product of variables
    survives in the face ring exactly when its support is a face; it must
    then match a nonzero gr monomial, distinct monomials staying distinct.
    Returns a list of mismatch records (empty = agreement).
    """
    ring = GrRing(pres.generators)
    mismatches = []
    seen: dict[IntVec, tuple] = {}
    verts = sorted(labels)
    for deg in range(1, degree_bound + 1):
        for multiset in combinations_with_replacement(verts, deg):
            total = (0,) * pres.ambient_dim
            for v in multiset:
                total = vadd(total, vec(labels[v]))
            sr_nonzero = abstract.has_face(set(multiset))
            gr_nonzero = ring.oracle.length(total) == deg
            if sr_nonzero != gr_nonzero:
                mismatches.append(
                    {
                        "check": "vanishing",
                        "multiset": list(multiset),
                        "stanley_reisner_nonzero": sr_nonzero,
                        "gr_nonzero": gr_nonzero,
                    }
                )
            if sr_nonzero and gr_nonzero:
                key = total + (deg,)
                if key in seen and seen[key] != multiset:
                    mismatches.append(
                        {
                            "check": "injectivity",
                            "multisets": [list(seen[key]), list(multiset)],
                        }
                    )
                seen[key] = multiset
    return mismatches
