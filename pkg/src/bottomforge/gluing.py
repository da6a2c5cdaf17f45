"""Cone gluing, stacked-complex realization, and stellar n-gon realizations."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import floor

from . import caps
from .bottomcx import (
    EmbeddedComplex,
    VerificationReport,
    bottom_complex,
    verify_reduced_bottom,
)
from .cone import (
    Cone,
    ConeFace,
    build_cone,
    enumerate_faces,
    face_of_rays,
    facet_lattice_isomorphism,
    map_sending_basis,
)
from .errors import (
    CapExceeded,
    DimensionMismatch,
    InputError,
    NonNormalFacet,
    NotIsomorphicFacets,
    NotStacked,
    ReducednessLost,
)
from .exactlin import (
    IntVec,
    UnimodularMap,
    complete_to_unimodular,
    dot,
    identity_matrix,
    integer_kernel,
    is_zero,
    mat,
    primitive_vector,
    solve,
    vadd,
    vec,
    vscale,
    vsub,
)
from .monoid import LatticePolytope, hilbert_basis, is_normal

DEFAULT_T_CAP = 2**20


@dataclass(frozen=True)
class GluingData:
    """Artifacts of a cone gluing along a shared facet."""

    theta: UnimodularMap
    reflection_used: bool
    u: IntVec
    v: IntVec
    w: tuple[IntVec, ...]
    gamma: IntVec
    h: IntVec
    t: int
    t_convex: int
    alpha_t: UnimodularMap
    beta_t: UnimodularMap
    side1_map: UnimodularMap  # original C1 -> glued cone (alpha_t . theta)
    side2_map: UnimodularMap  # original C2 -> glued cone (beta_t . reflection?)


def _wall_form(face: ConeFace) -> IntVec:
    """Primitive integer form vanishing exactly on span(face)."""
    kernel = integer_kernel(mat(face.lattice_basis))
    if len(kernel) != 1:
        raise DimensionMismatch("shared face is not a facet")
    return primitive_vector(kernel[0])


def _reduce_against(u, wall_basis):
    """Shrink u by wall-lattice vectors (sup-norm, a few passes)."""
    best = u
    changed = True
    while changed:
        changed = False
        for w in wall_basis:
            ww = dot(w, w)
            if ww == 0:
                continue
            q = Fraction(dot(best, w), ww)
            c = floor(q + Fraction(1, 2))
            if c:
                cand = vsub(best, vscale(c, w))
                if max(map(abs, cand)) < max(map(abs, best)) or (
                    max(map(abs, cand)) == max(map(abs, best)) and cand < best
                ):
                    best = cand
                    changed = True
    return best


def _shear(t: int, gamma: IntVec, h: IntVec, sign: int) -> UnimodularMap:
    """x -> x + sign*t*h(x)*gamma; unimodular since h(gamma) = 0."""
    d = len(gamma)
    rows = [
        tuple((1 if i == j else 0) + sign * t * gamma[i] * h[j] for j in range(d))
        for i in range(d)
    ]
    return UnimodularMap(mat(rows))


def _validate_theta(theta: UnimodularMap, f1: ConeFace, f2: ConeFace):
    image = {primitive_vector(theta.apply(r)) for r in f1.rays}
    if image != set(f2.rays):
        raise NotIsomorphicFacets("theta does not carry the first facet onto the second")


def glue_cones(
    c1: Cone,
    f1: ConeFace,
    c2: Cone,
    f2: ConeFace,
    theta: UnimodularMap | None = None,
    gamma: IntVec | None = None,
    t_cap: int = DEFAULT_T_CAP,
):
    """Glue two full cones along lattice-isomorphic facets.

    Returns (glued cone, GluingData) where the glued cone is
    alpha_t(D1) union beta_t(D2) for the minimal t that makes the union
    convex; the data records the canonical choices."""
    if c1.dim != c2.dim:
        raise DimensionMismatch("cones live in different ambient dimensions")
    d = c1.dim
    if theta is None:
        theta = facet_lattice_isomorphism(f1, f2)
        if theta is None:
            raise NotIsomorphicFacets("facets are not lattice isomorphic")
    else:
        _validate_theta(theta, f1, f2)
    d1 = c1.apply(theta)
    h = _wall_form(f2)
    side1 = {dot(h, r) for r in d1.extreme_rays} - {0}
    if not side1 or (min(side1) < 0 < max(side1)):
        raise InputError("image of the first cone does not lie on one side of the wall")
    if min(side1) < 0:
        h = vscale(-1, h)
    wall_basis = f2.lattice_basis
    u0 = complete_to_unimodular(wall_basis)[len(wall_basis):][0]
    if dot(h, u0) < 0:
        u0 = vscale(-1, u0)
    assert dot(h, u0) == 1
    u = _reduce_against(u0, wall_basis)
    v = vscale(-1, u)
    side2 = {dot(h, r) for r in c2.extreme_rays} - {0}
    if not side2 or (min(side2) < 0 < max(side2)):
        raise InputError("second cone does not lie on one side of the wall")
    reflection_used = min(side2) > 0
    if reflection_used:
        refl_rows = [
            tuple((1 if i == j else 0) - 2 * u[i] * h[j] for j in range(d))
            for i in range(d)
        ]
        reflection = UnimodularMap(mat(refl_rows))
        d2 = c2.apply(reflection)
    else:
        reflection = UnimodularMap.identity(d)
        d2 = c2
    wall = face_of_rays(d1, f2.rays)
    if set(wall.rays) != set(f2.rays) or wall.dim != d - 1:
        raise NotIsomorphicFacets("shared facet mismatch after mapping")
    wall_cone = build_cone(f2.rays)
    if gamma is None:
        g = (0,) * d
        for e in hilbert_basis(wall_cone).elements:
            g = vadd(g, e)
        gamma = g
    gamma = vec(gamma)
    if not wall_cone.contains_in_interior(gamma) or dot(h, gamma) != 0:
        raise InputError("gamma is not interior to the shared facet")
    off1 = [r for r in d1.extreme_rays if dot(h, r) > 0]
    off2 = [r for r in d2.extreme_rays if dot(h, r) < 0]
    t_convex = 0
    for x in off1:
        hx = dot(h, x)
        for y in off2:
            hy = dot(h, y)
            p0 = vsub(vscale(hx, y), vscale(hy, x))
            slope = -2 * hx * hy
            for n in list(wall_cone.facet_normals) + list(wall_cone.span_orth):
                strict = n in wall_cone.facet_normals
                num = dot(n, p0)
                den = slope * dot(n, gamma)
                if den == 0:
                    if (strict and num <= 0) or (not strict and num != 0):
                        raise InputError("segment condition cannot be met for any t")
                    continue
                need = Fraction(-num, den)
                tmin = floor(need) + 1 if strict else None
                if strict and tmin is not None:
                    t_convex = max(t_convex, tmin)
    t_convex = max(t_convex, 0)
    if t_convex > t_cap:
        raise CapExceeded(f"required t {t_convex} exceeds the cap {t_cap}")
    return _assemble(
        d1, d2, theta, reflection, reflection_used, u, v, wall_basis, gamma, h,
        t_convex, t_convex,
    )


def _assemble(d1, d2, theta, reflection, reflection_used, u, v, wall_basis, gamma, h,
              t, t_convex):
    alpha = _shear(t, gamma, h, +1)
    beta = _shear(t, gamma, h, -1)
    glued = build_cone(
        [alpha.apply(r) for r in d1.extreme_rays]
        + [beta.apply(r) for r in d2.extreme_rays]
    )
    data = GluingData(
        theta=theta,
        reflection_used=reflection_used,
        u=u,
        v=v,
        w=wall_basis,
        gamma=gamma,
        h=h,
        t=t,
        t_convex=t_convex,
        alpha_t=alpha,
        beta_t=beta,
        side1_map=alpha.compose(theta),
        side2_map=beta.compose(reflection),
    )
    return glued, data


def glue_reduced(
    c1: Cone,
    f1: ConeFace,
    c2: Cone,
    f2: ConeFace,
    theta: UnimodularMap | None = None,
    gamma: IntVec | None = None,
    t_cap: int = DEFAULT_T_CAP,
):
    """Glue reduced conic realizations so the glued bottom is again reduced.

    Pushes t beyond the cone-convexity threshold until the union of the two
    bottoms is the (reduced) bottom of the glued cone.  Returns
    (cone, GluingData, VerificationReport)."""
    b1 = bottom_complex(c1)
    b2 = bottom_complex(c2)
    for name, b in (("first", b1), ("second", b2)):
        if not verify_reduced_bottom(b).ok:
            raise InputError(f"{name} cone is not a reduced conic realization")
    glued, data = glue_cones(c1, f1, c2, f2, theta=theta, gamma=gamma, t_cap=t_cap)
    reflection = _reflection_from(data)

    def union_complex(t):
        alpha = _shear(t, data.gamma, data.h, +1)
        beta = _shear(t, data.gamma, data.h, -1)
        facets = []
        for f in b1.facets:
            facets.append(
                tuple(sorted(alpha.apply(data.theta.apply(p)) for p in b1.facet_points(f)))
            )
        for f in b2.facets:
            facets.append(
                tuple(sorted(beta.apply(reflection.apply(p)) for p in b2.facet_points(f)))
            )
        return EmbeddedComplex.from_facet_polytopes(c1.dim, facets)

    def passes(t):
        return verify_reduced_bottom(union_complex(t))

    t = data.t_convex
    report = passes(t)
    if not report.ok:
        lo = t
        step = 1
        found = None
        while lo + step <= t_cap:
            cand = lo + step
            rep = passes(cand)
            if rep.ok:
                found = (cand, rep)
                break
            lo = cand
            step *= 2
        if found is None:
            raise ReducednessLost(
                f"no t <= {t_cap} makes the glued bottom reduced", report=passes(t_cap)
            )
        hi, report = found
        while lo + 1 < hi:
            mid = (lo + hi) // 2
            rep = passes(mid)
            if rep.ok:
                hi, report = mid, rep
            else:
                lo = mid
        t = hi
    alpha = _shear(t, data.gamma, data.h, +1)
    beta = _shear(t, data.gamma, data.h, -1)
    glued = build_cone(
        [alpha.apply(data.theta.apply(r)) for r in c1.extreme_rays]
        + [beta.apply(reflection.apply(r)) for r in c2.extreme_rays]
    )
    data = GluingData(
        theta=data.theta,
        reflection_used=data.reflection_used,
        u=data.u,
        v=data.v,
        w=data.w,
        gamma=data.gamma,
        h=data.h,
        t=t,
        t_convex=data.t_convex,
        alpha_t=alpha,
        beta_t=beta,
        side1_map=alpha.compose(data.theta),
        side2_map=beta.compose(reflection),
    )
    return glued, data, report


def _reflection_from(data: GluingData) -> UnimodularMap:
    if not data.reflection_used:
        return UnimodularMap.identity(len(data.h))
    d = len(data.h)
    rows = [
        tuple((1 if i == j else 0) - 2 * data.u[i] * data.h[j] for j in range(d))
        for i in range(d)
    ]
    return UnimodularMap(mat(rows))


# ---------------------------------------------------------------------------
# Stacked complexes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StackedComplex:
    """An embedded complex together with a stacking order of its facets."""

    complex: EmbeddedComplex
    order: tuple[int, ...]

    @staticmethod
    def from_complex(k: EmbeddedComplex, order=None) -> "StackedComplex":
        idx = tuple(order) if order is not None else tuple(range(len(k.facets)))
        if sorted(idx) != list(range(len(k.facets))):
            raise InputError("stacking order must be a permutation of the facets")
        return StackedComplex(complex=k, order=idx)


def _shared_facet(k: EmbeddedComplex, placed_sets, facet) -> frozenset:
    """The unique maximal face of `facet` shared with the placed facets."""
    pts = k.facet_points(facet)
    own_faces = None
    from . import dd

    own_faces = dd.face_vertex_sets(pts)
    shared = set()
    for f in own_faces:
        if any(f <= ps for ps in placed_sets):
            shared.add(f)
    if not shared:
        raise NotStacked("facet does not touch the previously placed ones")
    maximal = [f for f in shared if not any(f < g for g in shared)]
    if len(maximal) != 1:
        raise NotStacked("facet meets the previous union in more than one face")
    target = maximal[0]
    expected_dim = LatticePolytope.from_points(pts).affine_dim - 1
    if LatticePolytope.from_points(tuple(target)).affine_dim != expected_dim:
        raise NotStacked("shared face is not a facet of the new polytope")
    return target


def _affine_lift(points):
    """Map polytope points into Z^k x {1} using their affine lattice."""
    from .exactlin import coordinates_in_basis, saturation_basis

    points = [vec(p) for p in points]
    v0 = points[0]
    diffs = [vsub(p, v0) for p in points]
    basis = saturation_basis(diffs)
    out = {}
    for p in points:
        c = coordinates_in_basis(vsub(p, v0), basis) if basis else ()
        assert c is not None and all(x.denominator == 1 for x in c)
        out[p] = tuple(int(x) for x in c) + (1,)
    return out


def _independent_spanning(points):
    """A linearly independent subset of lifted points spanning their span."""
    from .exactlin import rank as _rank

    chosen = []
    for p in points:
        if _rank(mat(chosen + [p])) > len(chosen):
            chosen.append(p)
    return chosen


def stack_realize(s: StackedComplex, reduced: bool = True, t_cap: int = DEFAULT_T_CAP):
    """Iterated gluing of the cones over the facets, in stacking order.

    Returns (cone, placement) where placement maps vertex ids of the
    abstract complex to points of the realized bottom."""
    k = s.complex
    k.validate()
    order = s.order
    if reduced:
        for fi in order:
            poly = LatticePolytope.from_points(k.facet_points(k.facets[fi]))
            if not is_normal(poly):
                raise NonNormalFacet(f"facet {k.facets[fi]} is not a normal polytope")
    first = k.facets[order[0]]
    lift = _affine_lift(k.facet_points(first))
    # placement maps original points to coordinates in the realization
    placement = {p: lift[p] for p in k.facet_points(first)}
    lattice_placement = {}
    for p in dd_lattice_points(k, first):
        lattice_placement[p] = _lift_point(k.facet_points(first), lift, p)
    current = build_cone(list(placement.values()))
    placed_sets = [frozenset(k.facet_points(first))]
    for fi in order[1:]:
        facet = k.facets[fi]
        pts = k.facet_points(facet)
        target = _shared_facet(k, placed_sets, facet)
        lift_i = _affine_lift(pts)
        new_cone = build_cone([lift_i[p] for p in pts])
        shared_lattice = dd_lattice_points_of(tuple(target))
        side_new = [_lift_point(pts, lift_i, q) for q in shared_lattice]
        side_cur = [lattice_placement[q] for q in shared_lattice]
        f_new = face_of_rays(new_cone, side_new)
        f_cur = face_of_rays(current, side_cur)
        if f_new.dim != new_cone.rank - 1 or f_cur.dim != current.rank - 1:
            raise NotStacked("shared face does not span a facet of the cones")
        base = _independent_spanning(side_new)
        images = [side_cur[side_new.index(b)] for b in base]
        theta = _extend_span_map(base, images, f_new, f_cur)
        if reduced:
            glued, data, _report = glue_reduced(
                new_cone, f_new, current, f_cur, theta=theta, t_cap=t_cap
            )
        else:
            glued, data = glue_cones(
                new_cone, f_new, current, f_cur, theta=theta, t_cap=t_cap
            )
        placement = {p: data.side2_map.apply(q) for p, q in placement.items()}
        lattice_placement = {
            p: data.side2_map.apply(q) for p, q in lattice_placement.items()
        }
        for p in pts:
            placement[p] = data.side1_map.apply(lift_i[p])
        for p in dd_lattice_points(k, facet):
            lattice_placement[p] = data.side1_map.apply(_lift_point(pts, lift_i, p))
        current = glued
        placed_sets.append(frozenset(pts))
    return current, placement


def dd_lattice_points(k: EmbeddedComplex, facet):
    from . import dd

    return dd.lattice_points_of_polytope(k.facet_points(facet))


def dd_lattice_points_of(points):
    from . import dd

    return dd.lattice_points_of_polytope(points)


def _lift_point(facet_points, lift, p):
    """Lift an arbitrary lattice point of the facet via the affine chart."""
    from .exactlin import coordinates_in_basis, saturation_basis

    v0 = facet_points[0]
    diffs = [vsub(q, v0) for q in facet_points]
    basis = saturation_basis(diffs)
    c = coordinates_in_basis(vsub(vec(p), v0), basis) if basis else ()
    assert c is not None and all(x.denominator == 1 for x in c)
    return tuple(int(x) for x in c) + (1,)


def _extend_span_map(base, images, f_new, f_cur) -> UnimodularMap:
    """Extend span(base) -> span(images) (lattice points to lattice points)
    to a Z^d automorphism via unimodular completions."""
    b_new = f_new.lattice_basis
    b_cur = f_cur.lattice_basis
    mapped_rows = []
    for row in b_new:
        coeffs = solve(mat(base), row)
        assert coeffs is not None
        img = (0,) * len(row)
        img = tuple(
            sum(coeffs[j] * images[j][i] for j in range(len(base))) for i in range(len(row))
        )
        assert all(x.denominator == 1 for x in img)
        mapped_rows.append(tuple(int(x) for x in img))
    comp_new = complete_to_unimodular(b_new)[len(b_new):]
    comp_cur = complete_to_unimodular(b_cur)[len(b_cur):]
    return map_sending_basis(list(b_new) + list(comp_new), mapped_rows + list(comp_cur))


# ---------------------------------------------------------------------------
# Stellar n-gon realizations by cracking in half
# ---------------------------------------------------------------------------

_BASE_POLYGONS = {
    3: ((1, 0), (0, 1), (-1, -1)),
    4: ((1, 0), (0, 1), (-1, 0), (0, -1)),
    5: ((1, 0), (0, 1), (-1, 0), (0, -1), (1, 1)),
}


def _boundary_cycle(k: EmbeddedComplex):
    """(apex, cyclically ordered boundary vertices) of a stellar bottom."""
    facet_pts = [k.facet_points(f) for f in k.facets]
    apex_candidates = set(facet_pts[0])
    for pts in facet_pts[1:]:
        apex_candidates &= set(pts)
    if len(apex_candidates) != 1:
        raise InputError("bottom is not a stellar triangulation")
    apex = next(iter(apex_candidates))
    edges = {}
    for pts in facet_pts:
        w = [p for p in pts if p != apex]
        if len(w) != 2:
            raise InputError("bottom facet is not a triangle through the apex")
        edges.setdefault(w[0], []).append(w[1])
        edges.setdefault(w[1], []).append(w[0])
    start = min(edges)
    cycle = [start]
    prev = None
    while True:
        nxts = [q for q in edges[cycle[-1]] if q != prev]
        if not nxts:
            raise InputError("boundary is not a cycle")
        nxt = min(nxts) if prev is None else nxts[0]
        if nxt == start:
            break
        prev = cycle[-1]
        cycle.append(nxt)
        if len(cycle) > len(edges):
            raise InputError("boundary is not a single cycle")
    return apex, cycle


def _crack_pairs(apex, cycle):
    """Edge index pairs (a, b) crackable by a plane through 0 and the apex."""
    n = len(cycle)
    out = []
    for a in range(n):
        e_a = vadd(cycle[a], cycle[(a + 1) % n])
        kernel = integer_kernel(mat([apex, e_a]))
        if len(kernel) != 1:
            continue
        h = primitive_vector(kernel[0])
        if dot(h, cycle[(a + 1) % n]) < 0:
            h = vscale(-1, h)
        vals = [dot(h, w) for w in cycle]
        if vals[(a + 1) % n] <= 0:
            continue
        for b in range(a + 1, n):
            if vals[b] > 0 and vals[(b + 1) % n] < 0 and vals[b] + vals[(b + 1) % n] == 0:
                side1 = [(a + i) % n for i in range(1, b - a + 1)]
                side2 = [i for i in range(n) if i not in side1]
                if all(vals[i] > 0 for i in side1) and all(vals[i] < 0 for i in side2):
                    e_b = vadd(cycle[b], cycle[(b + 1) % n])
                    wall = build_cone([e_a, e_b])
                    if wall.rank == 2 and wall.contains_in_interior(apex):
                        out.append((a, b, h, e_a, e_b, side1, side2))
    return out


def realize_stellar_ngon(n: int, t_cap: int = DEFAULT_T_CAP):
    """A reduced conic realization of the stellar triangulation of the n-gon.

    Base cases are the cones over the three smooth Fano polygons at height
    two; larger n-gons are produced by repeatedly cracking a symmetric
    facet pair in half and re-gluing.  Returns (cone, steps metadata)."""
    if n < 3:
        raise InputError("need n >= 3")
    base = _BASE_POLYGONS[3 if n % 2 else 4] if n > 5 else _BASE_POLYGONS[n]
    if n in (3, 4, 5):
        return build_cone([v + (2,) for v in base]), []
    start = 5 if n % 2 else 4
    cone = build_cone([v + (2,) for v in _BASE_POLYGONS[start]])
    steps = []
    size = start
    while size < n:
        bc = bottom_complex(cone)
        apex, cycle = _boundary_cycle(bc)
        pairs = _crack_pairs(apex, cycle)
        if not pairs:
            raise InputError("no crackable facet pair found")
        a, b, h, e_a, e_b, side1, side2 = pairs[0]
        plus = build_cone([cycle[i] for i in side1] + [e_a, e_b])
        minus = build_cone([cycle[i] for i in side2] + [e_a, e_b])
        f_plus = face_of_rays(plus, (e_a, e_b))
        f_minus = face_of_rays(minus, (e_a, e_b))
        glued, data, _report = glue_reduced(
            plus, f_plus, minus, f_minus,
            theta=UnimodularMap.identity(3), gamma=apex, t_cap=t_cap,
        )
        steps.append({"pair": [a, b], "t": data.t, "t_convex": data.t_convex})
        cone = glued
        size += 2
    bc = bottom_complex(cone)
    apex, cycle = _boundary_cycle(bc)
    if len(cycle) != n:
        raise InputError("cracking produced an unexpected boundary length")
    return cone, steps
