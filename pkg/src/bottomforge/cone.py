"""Pointed rational cones: construction, face lattice, facet isomorphisms."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

from . import dd
from .errors import (
    CapExceeded,
    DimensionMismatch,
    NotPointed,
    ZeroDim,
)
from .exactlin import (
    IntVec,
    UnimodularMap,
    complete_to_unimodular,
    coordinates_in_basis,
    dot,
    is_zero,
    mat,
    mat_vec,
    primitive_vector,
    rank,
    saturation_basis,
    unimodular_inverse,
    vadd,
    vec,
)

FACET_ISO_HILBERT_CAP = 10


@dataclass(frozen=True)
class Cone:
    """cone(generators) in Z^dim, pointed; rays and normals kept primitive.

    span_orth is empty exactly when the cone is full-dimensional; facet
    normals cut out the cone inside its linear span.
    """

    dim: int
    generators: tuple[IntVec, ...]
    extreme_rays: tuple[IntVec, ...]
    facet_normals: tuple[IntVec, ...]
    span_orth: tuple[IntVec, ...] = ()

    @property
    def rank(self) -> int:
        return self.dim - len(self.span_orth)

    @property
    def is_full_dimensional(self) -> bool:
        return not self.span_orth

    @property
    def is_simplicial(self) -> bool:
        return len(self.extreme_rays) == self.rank

    def contains(self, v) -> bool:
        return all(dot(n, v) == 0 for n in self.span_orth) and all(
            dot(n, v) >= 0 for n in self.facet_normals
        )

    def contains_in_interior(self, v) -> bool:
        """Relative interior membership."""
        return all(dot(n, v) == 0 for n in self.span_orth) and all(
            dot(n, v) > 0 for n in self.facet_normals
        )

    @cached_property
    def positive_grading(self) -> IntVec:
        """A primitive integer form strictly positive on the cone minus 0."""
        total = (0,) * self.dim
        for n in self.facet_normals:
            total = vadd(total, n)
        if is_zero(total):
            raise NotPointed("no strictly positive grading exists")
        g = primitive_vector(total)
        assert all(dot(g, r) > 0 for r in self.extreme_rays)
        return g

    def facets(self) -> list["ConeFace"]:
        return [f for f in enumerate_faces(self)[self.rank - 1]] if self.rank >= 1 else []

    def apply(self, phi: UnimodularMap) -> "Cone":
        return build_cone([phi.apply(g) for g in self.generators])


@dataclass(frozen=True)
class ConeFace:
    """A face of a cone, recorded by its extreme rays and tight normals."""

    cone: Cone
    dim: int
    rays: tuple[IntVec, ...]
    defining_normals: tuple[IntVec, ...]

    @cached_property
    def lattice_basis(self) -> tuple[IntVec, ...]:
        """Basis of span(face) /\\ Z^d, rows."""
        return saturation_basis(self.rays)

    def as_cone(self) -> Cone:
        return build_cone(self.rays) if self.rays else build_cone([(0,) * self.cone.dim])


def build_cone(generators) -> Cone:
    """Exact construction from integer generators; rejects non-pointed input."""
    gens = [vec(g) for g in generators]
    if not gens:
        raise ZeroDim("no generators")
    dim = len(gens[0])
    if any(len(g) != dim for g in gens):
        raise DimensionMismatch("generators of mixed dimension")
    nonzero = [g for g in gens if not is_zero(g)]
    if not nonzero:
        raise ZeroDim("all generators are zero")
    dual = dd.dual_description(nonzero, dim)
    if not dd.is_pointed(nonzero, dim, dual):
        raise NotPointed("generators span a cone containing a line")
    rays = dd.extreme_rays(nonzero, dim, dual)
    return Cone(
        dim=dim,
        generators=tuple(nonzero),
        extreme_rays=rays,
        facet_normals=dual.facet_normals,
        span_orth=dual.span_orth,
    )


def enumerate_faces(cone: Cone) -> dict[int, list[ConeFace]]:
    """Complete face poset, grouped by dimension (1 .. rank); excludes {0}."""
    ray_index = {r: i for i, r in enumerate(cone.extreme_rays)}
    facet_ray_sets = []
    for n in cone.facet_normals:
        facet_ray_sets.append(frozenset(r for r in cone.extreme_rays if dot(n, r) == 0))
    all_sets = {frozenset(cone.extreme_rays)}
    queue = [frozenset(cone.extreme_rays)]
    while queue:
        f = queue.pop()
        for fs in facet_ray_sets:
            g = f & fs
            if g and g not in all_sets:
                all_sets.add(g)
                queue.append(g)
    grouped: dict[int, list[ConeFace]] = {}
    for rays in all_sets:
        rays_sorted = tuple(sorted(rays, key=lambda r: ray_index[r]))
        d = rank(mat(rays_sorted))
        normals = tuple(
            n for n in cone.facet_normals if all(dot(n, r) == 0 for r in rays_sorted)
        )
        grouped.setdefault(d, []).append(
            ConeFace(cone=cone, dim=d, rays=rays_sorted, defining_normals=normals)
        )
    for faces in grouped.values():
        faces.sort(key=lambda f: f.rays)
    return grouped


def face_of_rays(cone: Cone, rays) -> ConeFace:
    """The smallest face of the cone containing the given rays."""
    rays = [primitive_vector(vec(r)) for r in rays]
    tight = [n for n in cone.facet_normals if all(dot(n, r) == 0 for r in rays)]
    face_rays = tuple(
        r for r in cone.extreme_rays if all(dot(n, r) == 0 for n in tight)
    )
    return ConeFace(
        cone=cone, dim=rank(mat(face_rays)), rays=face_rays, defining_normals=tuple(tight)
    )


def face_lattice_cone(face: ConeFace):
    """The face as a full-dimensional cone in its lattice coordinates.

    Returns (cone_in_coords, basis) where basis rows map coordinate space
    back into Z^d: point = coords . basis.
    """
    basis = face.lattice_basis
    coords = []
    for r in face.rays:
        c = coordinates_in_basis(r, basis)
        assert c is not None and all(x.denominator == 1 for x in c)
        coords.append(tuple(int(x) for x in c))
    return build_cone(coords), basis


def facet_lattice_isomorphism(f1: ConeFace, f2: ConeFace) -> UnimodularMap | None:
    """A Z^d-automorphism carrying facet f1 onto facet f2 (and their lattice
    points onto each other), or None when the facet monoids differ.

    The search matches Hilbert bases of the two facet cones inside their
    span lattices and extends by a unimodular completion.
    """
    from .bottomcx import cones_lattice_isomorphic  # cycle: iso search lives there

    if f1.cone.dim != f2.cone.dim:
        raise DimensionMismatch("facets live in different ambient dimensions")
    if f1.dim != f2.dim:
        return None
    c1, b1 = face_lattice_cone(f1)
    c2, b2 = face_lattice_cone(f2)
    phi = cones_lattice_isomorphic(c1, c2, hilbert_cap=FACET_ISO_HILBERT_CAP)
    if phi is None:
        return None
    theta = map_sending_basis(
        list(b1) + list(complete_to_unimodular(b1)[len(b1):]),
        [mat_vec(mat(tuple(zip(*b2))), phi.apply(e)) for e in _unit_vectors(len(b1))]
        + list(complete_to_unimodular(b2)[len(b2):]),
    )
    image = {primitive_vector(theta.apply(r)) for r in f1.rays}
    assert image == set(f2.rays)
    return theta


def _unit_vectors(k):
    for i in range(k):
        yield tuple(1 if j == i else 0 for j in range(k))


def map_sending_basis(source_rows, target_rows) -> UnimodularMap:
    """The linear map with A * s_i = t_i for Z^d row bases s, t."""
    from .exactlin import mat_mul, transpose

    A = mat_mul(transpose(mat(target_rows)), unimodular_inverse(transpose(mat(source_rows))))
    return UnimodularMap(mat(A))
