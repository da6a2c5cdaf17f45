"""Double description over exact rationals.

Internal engine for cone duality, polytope hull/H-rep conversions and
lattice point enumeration.  Intended scale is small (ambient dimension
<= 6, a few dozen generators), so the classical incremental algorithm
with the combinatorial adjacency test is plenty.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from . import caps
from .errors import CapExceeded, DimensionMismatch
from .exactlin import (
    IntVec,
    dot,
    identity_matrix,
    is_zero,
    mat,
    primitive_vector,
    rank,
    vec,
    vscale,
    vsub,
)


def _canon(vectors):
    return tuple(sorted(set(vectors)))


def _dedupe(rays):
    seen = set()
    out = []
    for r in rays:
        if r not in seen:
            seen.add(r)
            out.append(r)
    return out


def dd_from_inequalities(normals, dim: int):
    """Rays and lineality of {x : <a, x> >= 0 for all a in normals}.

    Returns (lineality_basis, rays), all primitive integer vectors; the
    solution cone equals span(lineality) + cone(rays).
    """
    lineality = [vec(e) for e in identity_matrix(dim)]
    rays: list[IntVec] = []
    done: list[IntVec] = []
    for a in normals:
        a = vec(a)
        if len(a) != dim:
            raise DimensionMismatch("normal of wrong dimension")
        idx = next((i for i, l in enumerate(lineality) if dot(a, l) != 0), None)
        if idx is not None:
            pivot = lineality[idx]
            if dot(a, pivot) < 0:
                pivot = vscale(-1, pivot)
            ap = dot(a, pivot)
            new_lin = []
            for i, l in enumerate(lineality):
                if i == idx:
                    continue
                val = dot(a, l)
                new_lin.append(
                    primitive_vector(vsub(vscale(ap, l), vscale(val, pivot))) if val else l
                )
            new_rays = []
            for r in rays:
                val = dot(a, r)
                new_rays.append(
                    primitive_vector(vsub(vscale(ap, r), vscale(val, pivot))) if val else r
                )
            lineality = new_lin
            rays = _dedupe(new_rays + [pivot])
            done.append(a)
            continue
        vals = {r: dot(a, r) for r in rays}
        pos = [r for r in rays if vals[r] > 0]
        zero = [r for r in rays if vals[r] == 0]
        neg = [r for r in rays if vals[r] < 0]
        if not neg:
            done.append(a)
            continue
        zerosets = {r: frozenset(i for i, c in enumerate(done) if dot(c, r) == 0) for r in rays}
        created = []
        for p, n in product(pos, neg):
            common = zerosets[p] & zerosets[n]
            adjacent = not any(
                r is not p and r is not n and common <= zerosets[r] for r in rays
            )
            if adjacent:
                created.append(primitive_vector(vsub(vscale(vals[p], n), vscale(vals[n], p))))
        rays = _dedupe(pos + zero + created)
        done.append(a)
        if len(rays) > caps.get_cap():
            raise CapExceeded("double description ray count exceeded the cap")
    return tuple(lineality), _canon(rays)


@dataclass(frozen=True)
class DualDescription:
    """Facet data of cone(generators) in Z^dim."""

    dim: int
    span_orth: tuple[IntVec, ...]       # basis of span(generators)^perp
    facet_normals: tuple[IntVec, ...]   # inner normals; facets relative to the span

    @property
    def full_dimensional(self) -> bool:
        return not self.span_orth

    def contains(self, v) -> bool:
        return all(dot(n, v) == 0 for n in self.span_orth) and all(
            dot(n, v) >= 0 for n in self.facet_normals
        )


def dual_description(generators, dim: int) -> DualDescription:
    """Inner facet normals (and span equations) of cone(generators)."""
    if not generators:
        return DualDescription(
            dim=dim, span_orth=_canon(vec(e) for e in identity_matrix(dim)), facet_normals=()
        )
    lin, rays = dd_from_inequalities(generators, dim)
    return DualDescription(dim=dim, span_orth=_canon(lin), facet_normals=_canon(rays))


def is_pointed(generators, dim: int, dual: DualDescription | None = None) -> bool:
    dual = dual or dual_description(generators, dim)
    spanning = list(dual.span_orth) + list(dual.facet_normals)
    return bool(spanning) and rank(mat(spanning)) == dim


def extreme_rays(generators, dim: int, dual: DualDescription | None = None):
    """Primitive extreme rays of a pointed cone(generators)."""
    dual = dual or dual_description(generators, dim)
    out = []
    for g in generators:
        if is_zero(g):
            continue
        tight = [n for n in dual.facet_normals if dot(n, g) == 0]
        tight += list(dual.span_orth)
        if tight and rank(mat(tight)) == dim - 1:
            out.append(primitive_vector(g))
    return _canon(out)


def rays_from_inequalities(normals, equalities, dim: int):
    """Extreme rays of {x : normals >= 0, equalities = 0} (must be pointed)."""
    constraints = [vec(n) for n in normals]
    for e in equalities:
        constraints.append(vec(e))
        constraints.append(vscale(-1, vec(e)))
    lin, rays = dd_from_inequalities(constraints, dim)
    if lin:
        raise DimensionMismatch("inequality system is not pointed")
    return rays


# ---------------------------------------------------------------------------
# Polytopes (bounded hulls of integer points)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HRep:
    """conv(points) as {x : eq . x = c, ineq . x >= c}."""

    dim: int
    equalities: tuple[tuple[IntVec, int], ...]
    inequalities: tuple[tuple[IntVec, int], ...]

    def contains(self, x) -> bool:
        return all(dot(a, x) == c for a, c in self.equalities) and all(
            dot(a, x) >= c for a, c in self.inequalities
        )

    def tight_inequalities(self, x):
        return [i for i, (a, c) in enumerate(self.inequalities) if dot(a, x) == c]


def polytope_hrep(points) -> HRep:
    points = [vec(p) for p in points]
    dim = len(points[0])
    lifted = [p + (1,) for p in points]
    dual = dual_description(lifted, dim + 1)
    eqs = [(n[:dim], -n[dim]) for n in dual.span_orth]
    ineqs = [(n[:dim], -n[dim]) for n in dual.facet_normals]
    return HRep(dim=dim, equalities=tuple(eqs), inequalities=tuple(ineqs))


def hull_vertices(points):
    """Vertices of conv(points), canonically sorted."""
    points = [vec(p) for p in points]
    hrep = polytope_hrep(points)
    aff_dim = len(points[0]) - len(hrep.equalities)
    out = []
    for p in set(points):
        if aff_dim == 0:
            out.append(p)
            continue
        tight = [hrep.inequalities[i][0] for i in hrep.tight_inequalities(p)]
        tight += [a for a, _ in hrep.equalities]
        if tight and rank(mat(tight)) == len(p):
            out.append(p)
    return _canon(out)


def lattice_points_hrep(hrep: HRep, box_lo, box_hi):
    """All integer points of the H-rep inside the closed coordinate box."""
    size = 1
    for lo, hi in zip(box_lo, box_hi):
        size *= max(0, hi - lo + 1)
    if size > caps.get_cap():
        raise CapExceeded(f"lattice point box of size {size} exceeds the cap")
    out = []
    for p in product(*[range(lo, hi + 1) for lo, hi in zip(box_lo, box_hi)]):
        if hrep.contains(p):
            out.append(p)
    return _canon(out)


def lattice_points_of_polytope(points):
    """All integer points of conv(points)."""
    points = [vec(p) for p in points]
    hrep = polytope_hrep(points)
    lo = [min(p[i] for p in points) for i in range(len(points[0]))]
    hi = [max(p[i] for p in points) for i in range(len(points[0]))]
    return lattice_points_hrep(hrep, lo, hi)


def polytope_intersection_vertices(points_a, points_b):
    """Vertices of conv(points_a) /\\ conv(points_b), as Fraction tuples."""
    ha = polytope_hrep(points_a)
    hb = polytope_hrep(points_b)
    dim = ha.dim
    constraints = []
    for a, c in list(ha.inequalities) + list(hb.inequalities):
        constraints.append(vec(a) + (-c,))
    for a, c in list(ha.equalities) + list(hb.equalities):
        v = vec(a) + (-c,)
        constraints.append(v)
        constraints.append(vscale(-1, v))
    constraints.append(vec((0,) * dim) + (1,))
    lin, rays = dd_from_inequalities(constraints, dim + 1)
    if any(not is_zero(l) for l in lin):
        raise DimensionMismatch("unexpected unbounded polytope intersection")
    verts = set()
    for r in rays:
        if r[dim] > 0:
            verts.add(tuple(Fraction(x, r[dim]) for x in r[:dim]))
        elif not is_zero(r[:dim]):
            raise DimensionMismatch("unexpected unbounded polytope intersection")
    return tuple(sorted(verts))


def face_vertex_sets(points):
    """All nonempty faces of conv(points) as frozensets of vertices."""
    verts = hull_vertices(points)
    hrep = polytope_hrep(verts)
    base = frozenset(verts)
    faces = {base}
    facet_sets = [
        frozenset(v for v in verts if dot(a, v) == c) for a, c in hrep.inequalities
    ]
    queue = [base]
    while queue:
        f = queue.pop()
        for fs in facet_sets:
            g = f & fs
            if g and g not in faces:
                faces.add(g)
                queue.append(g)
    return faces


def minimal_face_containing(points, subset):
    """Vertex set of the smallest face of conv(points) containing subset."""
    verts = hull_vertices(points)
    hrep = polytope_hrep(verts)
    current = frozenset(verts)
    for a, c in hrep.inequalities:
        if all(dot(a, s) == c for s in subset):
            current &= frozenset(v for v in verts if dot(a, v) == c)
    return current
