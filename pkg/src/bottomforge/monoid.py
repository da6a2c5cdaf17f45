"""Affine monoid computations: Hilbert bases, lattice points, normality,
maximal decomposition lengths."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import product
from math import floor

from . import caps, dd
from .cone import Cone, build_cone, enumerate_faces
from .errors import (
    CapExceeded,
    DimensionMismatch,
    NotASimplex,
    NotInMonoid,
    NotPointed,
    OriginOnHyperplane,
    ZeroVector,
)
from .exactlin import (
    IntVec,
    coordinates_in_basis,
    det,
    diagonalize_integer,
    dot,
    is_part_of_lattice_basis,
    is_zero,
    mat,
    primitive_vector,
    rank,
    saturation_basis,
    solve,
    unimodular_inverse,
    vadd,
    vec,
    vsub,
)


@dataclass(frozen=True)
class HilbertBasis:
    cone: Cone
    elements: tuple[IntVec, ...]


@dataclass(frozen=True)
class LatticePolytope:
    """conv(vertices) with vertices in Z^d; vertices must be extreme."""

    ambient_dim: int
    vertices: tuple[IntVec, ...]

    @staticmethod
    def from_points(points) -> "LatticePolytope":
        pts = [vec(p) for p in points]
        return LatticePolytope(ambient_dim=len(pts[0]), vertices=dd.hull_vertices(pts))

    @cached_property
    def lattice_points(self) -> tuple[IntVec, ...]:
        return dd.lattice_points_of_polytope(self.vertices)

    @cached_property
    def affine_dim(self) -> int:
        if len(self.vertices) == 1:
            return 0
        v0 = self.vertices[0]
        return rank(mat([vsub(v, v0) for v in self.vertices[1:]]))


def lattice_points(p: LatticePolytope):
    """All integer points in the polytope, canonically ordered."""
    return list(p.lattice_points)


def _simplicial_pieces(cone: Cone):
    """Triangulation of the cone into simplicial subcones (tuples of rays).

    Recursive placing: pick the first extreme ray, triangulate the facets
    not containing it, and cone over them.
    """
    if cone.is_simplicial:
        return [cone.extreme_rays]
    r0 = cone.extreme_rays[0]
    pieces = []
    for facet in enumerate_faces(cone)[cone.rank - 1]:
        if r0 in facet.rays:
            continue
        for sub in _simplicial_pieces(build_cone(facet.rays)):
            pieces.append(tuple(sorted(sub + (r0,))))
    return pieces


def _parallelepiped_points(rays):
    """Integer points of {sum t_i r_i : 0 <= t_i < 1} for independent rays.

    Enumerated through the diagonalization of the ray matrix: one point
    per residue class of Z^d modulo the ray lattice.
    """
    d = len(rays)
    S = mat(tuple(zip(*rays)))  # columns are the rays
    vol = abs(det(S))
    if vol == 0:
        raise DimensionMismatch("parallelepiped of dependent rays")
    if vol > caps.get_cap():
        raise CapExceeded(f"parallelepiped volume {vol} exceeds the cap")
    D, U, _ = diagonalize_integer(S)
    Uinv = unimodular_inverse(U)
    diag = [abs(D[i][i]) for i in range(d)]
    Sinv_rows = _rational_inverse_rows(S)
    points = set()
    for residue in product(*[range(m) for m in diag]):
        x = tuple(sum(Uinv[i][j] * residue[j] for j in range(d)) for i in range(d))
        t = [sum(Sinv_rows[i][j] * x[j] for j in range(d)) for i in range(d)]
        shift = [floor(ti) for ti in t]
        x = tuple(x[i] - sum(S[i][j] * shift[j] for j in range(d)) for i in range(d))
        points.add(x)
    assert len(points) == vol
    return points


def _rational_inverse_rows(S):
    d = len(S)
    rows = []
    for i in range(d):
        e = tuple(1 if j == i else 0 for j in range(d))
        col = solve(S, e)
        rows.append(col)
    # solve gives columns of S^{-1}; transpose back
    return [tuple(rows[j][i] for j in range(d)) for i in range(d)]


def _to_sublattice(points, basis):
    out = []
    for p in points:
        c = coordinates_in_basis(p, basis)
        if c is None or any(x.denominator != 1 for x in c):
            raise DimensionMismatch("point outside the sublattice")
        out.append(tuple(int(x) for x in c))
    return out


def _from_sublattice(points, basis):
    cols = mat(tuple(zip(*basis)))
    return [tuple(dot(row, p) for row in cols) for p in points]


def hilbert_basis(cone: Cone) -> HilbertBasis:
    """The minimal generating set of cone /\\ Z^d.

    Triangulates into simplicial subcones, collects fundamental
    parallelepiped points and ray generators, then filters reducible
    elements by exhaustive subtraction.
    """
    if not cone.is_full_dimensional:
        sub, basis = _cone_in_span_lattice(cone)
        inner = hilbert_basis(sub)
        return HilbertBasis(
            cone=cone, elements=tuple(sorted(_from_sublattice(inner.elements, basis)))
        )
    candidates = set(cone.extreme_rays)
    for piece in _simplicial_pieces(cone):
        for p in _parallelepiped_points(piece):
            if not is_zero(p):
                candidates.add(p)
    elements = []
    for m in candidates:
        reducible = any(
            h != m and cone.contains(vsub(m, h)) and not is_zero(vsub(m, h))
            for h in candidates
        )
        if not reducible:
            elements.append(m)
    return HilbertBasis(cone=cone, elements=tuple(sorted(elements)))


def _cone_in_span_lattice(cone: Cone):
    basis = saturation_basis(cone.extreme_rays)
    return build_cone(_to_sublattice(cone.extreme_rays, basis)), basis


def hilbert_basis_brute_force(cone: Cone, height_bound: int | None = None):
    """Independent oracle: bounded-height scan plus reducibility filtering.

    Enumerates all lattice points with positive grading value up to the
    bound (default: enough to cover the fundamental region, via the sum of
    grading values of the extreme rays) and keeps the irreducible ones.
    Only correct as a full Hilbert basis when the bound really covers it;
    callers cross-check against `hilbert_basis`.
    """
    if not cone.is_full_dimensional:
        sub, basis = _cone_in_span_lattice(cone)
        return tuple(
            sorted(_from_sublattice(hilbert_basis_brute_force(sub, height_bound), basis))
        )
    grading = cone.positive_grading
    if height_bound is None:
        height_bound = sum(dot(grading, r) for r in cone.extreme_rays)
    pts = _cone_points_up_to(cone, grading, height_bound)
    irr = [m for m in pts if not any(
        h != m and cone.contains(vsub(m, h)) and not is_zero(vsub(m, h)) for h in pts
    )]
    return tuple(sorted(irr))


def _cone_points_up_to(cone: Cone, grading, bound):
    """Nonzero lattice points of the cone with <grading, x> <= bound."""
    corners = []
    for r in cone.extreme_rays:
        h = dot(grading, r)
        corners.append(tuple(Fraction(bound * x, h) for x in r))
    lo = [floor(min(c[i] for c in corners + [(Fraction(0),) * cone.dim])) for i in range(cone.dim)]
    hi = [-floor(-max(c[i] for c in corners + [(Fraction(0),) * cone.dim])) for i in range(cone.dim)]
    size = 1
    for a, b in zip(lo, hi):
        size *= max(0, b - a + 1)
    if size > caps.get_cap():
        raise CapExceeded(f"cone scan box of size {size} exceeds the cap")
    out = []
    for p in product(*[range(a, b + 1) for a, b in zip(lo, hi)]):
        if not is_zero(p) and dot(grading, p) <= bound and cone.contains(p):
            out.append(p)
    return sorted(out)


def cone_points_up_to_height(cone: Cone, bound: int):
    """Nonzero monoid elements with canonical positive grading <= bound."""
    if not cone.is_full_dimensional:
        sub, basis = _cone_in_span_lattice(cone)
        return tuple(sorted(_from_sublattice(cone_points_up_to_height(sub, bound), basis)))
    return tuple(_cone_points_up_to(cone, cone.positive_grading, bound))


# ---------------------------------------------------------------------------
# Normality and related predicates
# ---------------------------------------------------------------------------


def _affine_lattice_coords(p: LatticePolytope):
    """Polytope in the coordinates of its affine lattice Aff(P) /\\ Z^d."""
    v0 = p.vertices[0]
    diffs = [vsub(v, v0) for v in p.vertices]
    if p.affine_dim == 0:
        return LatticePolytope(ambient_dim=0, vertices=((),)), v0, ()
    basis = saturation_basis(diffs)
    verts = _to_sublattice(diffs, basis)
    return LatticePolytope.from_points(verts), v0, basis


def cone_over_polytope(p: LatticePolytope) -> Cone:
    """The cone over (P, 1), with P taken in its own affine lattice."""
    q, _, _ = _affine_lattice_coords(p)
    return build_cone([v + (1,) for v in q.vertices])


def is_normal(p: LatticePolytope) -> bool:
    """Hilbert-basis criterion: all of Hilb(cone over (P,1)) sits at height 1."""
    c = cone_over_polytope(p)
    hb = hilbert_basis(c)
    return all(m[-1] == 1 for m in hb.elements)


def is_normal_definitional(p: LatticePolytope, c_max: int) -> bool:
    """Definitional oracle: every point of c*P is a sum of c points of P."""
    q, _, _ = _affine_lattice_coords(p)
    base = set(q.lattice_points)
    sums = set(base)
    for c in range(2, c_max + 1):
        sums = {vadd(a, b) for a in sums for b in base}
        dilated = dd.lattice_points_of_polytope([tuple(c * x for x in v) for v in q.vertices])
        if not set(dilated) <= sums:
            return False
    return True


def is_unimodular_simplex(s: LatticePolytope) -> bool:
    """Edge vectors at a vertex extend to a lattice basis."""
    verts = s.vertices
    if s.affine_dim != len(verts) - 1:
        raise NotASimplex("vertices are not affinely independent")
    v0 = verts[0]
    edges = [vsub(v, v0) for v in verts[1:]]
    if not edges:
        return True
    return is_part_of_lattice_basis(edges)


def lattice_distance_one(p: LatticePolytope, origin) -> bool:
    """Is Aff(P) a hyperplane at lattice distance one from the origin?"""
    origin = vec(origin)
    v0 = p.vertices[0]
    diffs = [vsub(v, v0) for v in p.vertices]
    normals = [n for n in saturation_basis(diffs) or ()]
    orth = _hyperplane_normal(p)
    val = dot(orth, vsub(v0, origin))
    if val == 0:
        raise OriginOnHyperplane("origin lies on the affine hull")
    return abs(val) == 1


def _hyperplane_normal(p: LatticePolytope) -> IntVec:
    from .exactlin import integer_kernel

    v0 = p.vertices[0]
    diffs = [vsub(v, v0) for v in p.vertices[1:]]
    diffs = [d_ for d_ in diffs if not is_zero(d_)]
    if not diffs:
        raise DimensionMismatch("polytope affine hull is not a hyperplane")
    kernel = integer_kernel(mat(diffs))
    if len(kernel) != 1:
        raise DimensionMismatch("polytope affine hull is not a hyperplane")
    return primitive_vector(kernel[0])


# ---------------------------------------------------------------------------
# Maximal decomposition length
# ---------------------------------------------------------------------------


class DecompositionOracle:
    """Exact maximal decomposition lengths over a fixed generating set.

    Memoized depth-first search over residual vectors, pruned by cone
    membership; node count capped.
    """

    def __init__(self, gens, node_cap: int | None = None):
        self.gens = tuple(sorted({vec(g) for g in gens if not is_zero(vec(g))}))
        if not self.gens:
            raise ZeroVector("no nonzero generators")
        self.cone = build_cone(self.gens)
        if not dd.is_pointed(self.gens, len(self.gens[0])):
            raise NotPointed("generators do not span a pointed cone")
        self.node_cap = node_cap if node_cap is not None else caps.get_cap()
        self._memo: dict[IntVec, int | None] = {}
        self._nodes = 0

    def length_or_none(self, m) -> int | None:
        """max decomposition length of m, or None when m is not in the monoid."""
        m = vec(m)
        if is_zero(m):
            return 0
        if not self.cone.contains(m):
            return None
        if m in self._memo:
            return self._memo[m]
        self._nodes += 1
        if self._nodes > self.node_cap:
            raise CapExceeded("decomposition search exceeded the node cap")
        best = None
        for g in self.gens:
            rest = vsub(m, g)
            sub = self.length_or_none(rest)
            if sub is not None and (best is None or sub + 1 > best):
                best = sub + 1
        self._memo[m] = best
        return best

    def length(self, m) -> int:
        l = self.length_or_none(m)
        if l is None or is_zero(vec(m)):
            raise NotInMonoid(f"{m} has no decomposition over the generators")
        return l

    def contains(self, m) -> bool:
        return self.length_or_none(m) is not None


def max_decomposition_length(gens, m) -> int:
    """Maximum number of parts over all decompositions of m into nonzero
    elements of the monoid generated by gens."""
    return DecompositionOracle(gens).length(m)


def max_decomposition_length_in_cone(cone: Cone, m) -> int:
    return DecompositionOracle(hilbert_basis(cone).elements).length(m)
