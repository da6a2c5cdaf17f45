"""Embedded lattice polytopal complexes, bottom complexes and their verifiers."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import permutations

from . import dd
from .cone import Cone, build_cone
from .errors import (
    CapExceeded,
    DimensionMismatch,
    InputError,
    InvalidCoefficient,
)
from .exactlin import (
    IntVec,
    UnimodularMap,
    dot,
    is_zero,
    mat,
    rank,
    solve,
    vadd,
    vec,
    vscale,
    vsub,
)
from .monoid import (
    DecompositionOracle,
    LatticePolytope,
    hilbert_basis,
    is_normal,
    lattice_distance_one,
)

# Stable condition codes used in verification reports and their JSON form.
CLAUSE_BOTTOM_CONVEX = "L3.3a.i"
CLAUSE_BOTTOM_PYRAMID = "L3.3a.ii"
CLAUSE_REDUCED_CONVEX = "L3.3b.i"
CLAUSE_REDUCED_NORMAL = "L3.3b.ii"
CLAUSE_REDUCED_DISTANCE = "L3.3b.iii"
CLAUSE_FACET_HILBERT = "D3.2c"


@dataclass(frozen=True)
class EmbeddedComplex:
    """Finitely many lattice polytopes in Z^d glued along common faces.

    vertices maps string ids to points; facets list vertex-id tuples.  The
    face poset and per-face lattice points are derived, never stored.
    """

    ambient_dim: int
    vertices: dict[str, IntVec] = field(compare=False)
    facets: tuple[tuple[str, ...], ...] = ()

    def __post_init__(self):
        object.__setattr__(
            self, "vertices", {str(k): vec(v) for k, v in self.vertices.items()}
        )
        ordered = []
        for f in self.facets:
            ordered.append(tuple(sorted(f, key=_id_key)))
        object.__setattr__(self, "facets", tuple(sorted(ordered)))

    @staticmethod
    def from_facet_polytopes(ambient_dim: int, facet_point_sets) -> "EmbeddedComplex":
        """Build with canonical vertex ids ("1", "2", ... in lex point order)."""
        points = sorted({p for pts in facet_point_sets for p in pts})
        ids = {p: str(i + 1) for i, p in enumerate(points)}
        return EmbeddedComplex(
            ambient_dim=ambient_dim,
            vertices={ids[p]: p for p in points},
            facets=tuple(tuple(ids[p] for p in pts) for pts in facet_point_sets),
        )

    def facet_points(self, facet) -> tuple[IntVec, ...]:
        return tuple(self.vertices[v] for v in facet)

    def all_points(self) -> tuple[IntVec, ...]:
        return tuple(sorted(set(self.vertices.values())))

    def facet_point_sets(self):
        return [frozenset(self.facet_points(f)) for f in self.facets]

    def faces(self):
        """All nonempty faces, as frozensets of points."""
        out = set()
        for f in self.facets:
            out |= dd.face_vertex_sets(self.facet_points(f))
        return out

    def face_lattice_points(self, face_points):
        return dd.lattice_points_of_polytope(tuple(face_points))

    def validate(self) -> None:
        """Check the polytopal-complex axioms; raises InputError on failure."""
        if not self.facets:
            raise InputError("complex has no facets")
        for v, p in self.vertices.items():
            if len(p) != self.ambient_dim:
                raise DimensionMismatch(f"vertex {v} has wrong dimension")
        for f in self.facets:
            pts = self.facet_points(f)
            hull = set(dd.hull_vertices(pts))
            if hull != set(pts):
                raise InputError(f"facet {f} lists non-vertex points")
        face_sets = [dd.face_vertex_sets(self.facet_points(f)) for f in self.facets]
        for i in range(len(self.facets)):
            for j in range(i + 1, len(self.facets)):
                pi = self.facet_points(self.facets[i])
                pj = self.facet_points(self.facets[j])
                inter = dd.polytope_intersection_vertices(pi, pj)
                if not inter:
                    continue
                if any(any(x.denominator != 1 for x in v) for v in inter):
                    raise InputError(
                        f"facets {self.facets[i]} and {self.facets[j]} do not meet in a face"
                    )
                iset = frozenset(tuple(int(x) for x in v) for v in inter)
                if iset not in face_sets[i] or iset not in face_sets[j]:
                    raise InputError(
                        f"facets {self.facets[i]} and {self.facets[j]} do not meet in a face"
                    )


def _id_key(s: str):
    return (0, int(s)) if s.isdigit() else (1, s)


@dataclass(frozen=True)
class VerificationReport:
    status: str  # "bottom" | "reduced_bottom" | "fail"
    violations: tuple[dict, ...] = ()

    @property
    def ok(self) -> bool:
        return self.status != "fail"


def _violation(clause, facet_points=None, witness=None):
    out = {"clause": clause}
    out["facet"] = [list(p) for p in facet_points] if facet_points else []
    out["witness"] = witness if witness is not None else []
    return out


# ---------------------------------------------------------------------------
# Hulls with recession cone: compact facets
# ---------------------------------------------------------------------------


def compact_facets_of_hull(points, dim):
    """Compact facets of conv(points) + cone(points).

    Returns a list of (normal, value, vertex tuple); a facet is compact
    exactly when its hyperplane has positive value (every ray of the
    recession cone then leaves it).  Vertices are hull vertices only.
    """
    points = [vec(p) for p in points]
    gens = [p + (1,) for p in points] + [p + (0,) for p in points]
    dual = dd.dual_description(gens, dim + 1)
    vertex_flags = {}
    for p in points:
        lifted = p + (1,)
        tight = [n for n in dual.facet_normals if dot(n, lifted) == 0]
        tight += list(dual.span_orth)
        vertex_flags[p] = bool(tight) and rank(mat(tight)) == dim
    out = []
    for n in dual.facet_normals:
        a, c = n[:dim], -n[dim]
        if c > 0:
            verts = tuple(sorted(p for p in points if dot(a, p) == c and vertex_flags[p]))
            out.append((a, c, verts))
    out.sort(key=lambda t: t[2])
    return out


def bottom_complex(cone: Cone) -> EmbeddedComplex:
    """The complex of compact facets of conv(Hilb(C)) + C."""
    if not cone.is_full_dimensional:
        raise DimensionMismatch("bottom complex needs a full-dimensional cone")
    hb = hilbert_basis(cone).elements
    facets = compact_facets_of_hull(hb, cone.dim)
    return EmbeddedComplex.from_facet_polytopes(cone.dim, [f[2] for f in facets])


def complex_cone(k: EmbeddedComplex) -> Cone:
    """The conical set spanned by the complex (must be pointed)."""
    return build_cone(k.all_points())


def is_convex_towards_zero(k: EmbeddedComplex):
    """Is |K| a polytopal ball convex towards the origin?

    Exact criterion: cone(V) is pointed and full-dimensional and the facet
    set of K coincides with the compact facets of conv(V) + cone(V), with
    V the vertex set.  Returns (bool, violations).
    """
    pts = k.all_points()
    dim = k.ambient_dim
    if any(is_zero(p) for p in pts):
        return False, [_violation(CLAUSE_BOTTOM_CONVEX, witness=["origin is a vertex"])]
    dual = dd.dual_description(pts, dim)
    if not dual.full_dimensional or not dd.is_pointed(pts, dim, dual):
        return False, [
            _violation(
                CLAUSE_BOTTOM_CONVEX,
                witness=["conical set over the complex is not a pointed full cone"],
            )
        ]
    compact = {f[2] for f in compact_facets_of_hull(pts, dim)}
    own = {tuple(sorted(self_pts)) for self_pts in k.facet_point_sets()}
    if compact == own:
        return True, []
    violations = []
    for f in sorted(own - compact):
        violations.append(
            _violation(
                CLAUSE_BOTTOM_CONVEX,
                facet_points=f,
                witness=_separation_witness(f, pts),
            )
        )
    for f in sorted(compact - own):
        violations.append(
            _violation(
                CLAUSE_BOTTOM_CONVEX,
                facet_points=f,
                witness=["hull facet missing from the complex"],
            )
        )
    return False, violations


def _separation_witness(facet_points, all_points):
    """Explain why a facet is not a compact hull facet (best effort)."""
    try:
        p = LatticePolytope.from_points(facet_points)
        a = _facet_functional(p)
    except InputError:
        return ["facet affine hull is not a hyperplane off the origin"]
    except Exception:  # degenerate geometry: report generically
        return ["facet affine hull is not a hyperplane off the origin"]
    if a is None:
        return ["facet affine hull is not a hyperplane off the origin"]
    bad = [q for q in all_points if dot(a[0], q) < a[1] and q not in facet_points]
    if bad:
        return [list(q) for q in bad]
    return ["facet is not maximal in the hull"]


def _facet_functional(p: LatticePolytope):
    """(normal, value) with normal . x = value > 0 on Aff(P), or None."""
    from .monoid import _hyperplane_normal

    try:
        n = _hyperplane_normal(p)
    except InputError:
        return None
    val = dot(n, p.vertices[0])
    if val == 0:
        return None
    if val < 0:
        n, val = vscale(-1, n), -val
    return n, val


def verify_bottom(k: EmbeddedComplex) -> VerificationReport:
    """Bottom test: convex towards 0 plus empty pyramids over the facets."""
    ok, violations = is_convex_towards_zero(k)
    violations = [
        dict(v, clause=CLAUSE_BOTTOM_CONVEX) for v in violations
    ]
    if ok:
        zero = (0,) * k.ambient_dim
        for f in k.facets:
            pts = k.facet_points(f)
            allowed = set(k.face_lattice_points(pts)) | {zero}
            pyramid = dd.lattice_points_of_polytope(pts + (zero,))
            extra = sorted(set(pyramid) - allowed)
            if extra:
                violations.append(
                    _violation(CLAUSE_BOTTOM_PYRAMID, pts, [list(q) for q in extra])
                )
    status = "bottom" if not violations else "fail"
    return VerificationReport(status=status, violations=tuple(violations))


def verify_reduced_bottom(k: EmbeddedComplex) -> VerificationReport:
    """Reduced-bottom test: convexity towards 0, facet normality, lattice
    distance one; facet-cone Hilbert containment is checked and reported
    separately."""
    ok, conv_violations = is_convex_towards_zero(k)
    violations = [dict(v, clause=CLAUSE_REDUCED_CONVEX) for v in conv_violations]
    zero = (0,) * k.ambient_dim
    for f in k.facets:
        pts = k.facet_points(f)
        poly = LatticePolytope.from_points(pts)
        if not is_normal(poly):
            violations.append(_violation(CLAUSE_REDUCED_NORMAL, pts))
        try:
            if not lattice_distance_one(poly, zero):
                violations.append(_violation(CLAUSE_REDUCED_DISTANCE, pts))
        except InputError:
            violations.append(
                _violation(CLAUSE_REDUCED_DISTANCE, pts, ["affine hull through origin"])
            )
            continue
        facet_cone = build_cone(pts)
        hrep = dd.polytope_hrep(pts)
        strays = [
            h for h in hilbert_basis(facet_cone).elements if not hrep.contains(h)
        ]
        if strays:
            violations.append(
                _violation(CLAUSE_FACET_HILBERT, pts, [list(q) for q in strays])
            )
    status = "reduced_bottom" if not violations else "fail"
    return VerificationReport(status=status, violations=tuple(violations))


# ---------------------------------------------------------------------------
# One-dimensional realizations
# ---------------------------------------------------------------------------


def realize_path(c) -> EmbeddedComplex:
    """Reduced conic realization in Z^2 of the lattice path with bending
    coefficients c: points obey x[k+1] = c[k]*x[k] - x[k-1] from the seeds
    (1,0), (0,1).  Facets are the maximal collinear runs."""
    coeffs = [int(x) for x in c]
    if any(x <= 1 for x in coeffs):
        raise InvalidCoefficient("all coefficients must be >= 2")
    pts = [(1, 0), (0, 1)]
    for ck in coeffs:
        pts.append(vsub(vscale(ck, pts[-1]), pts[-2]))
    runs = []
    start = 0
    for i in range(1, len(pts) - 1):
        d1 = vsub(pts[i], pts[i - 1])
        d2 = vsub(pts[i + 1], pts[i])
        if d1[0] * d2[1] - d1[1] * d2[0] != 0:
            runs.append((pts[start], pts[i]))
            start = i
    runs.append((pts[start], pts[-1]))
    return EmbeddedComplex.from_facet_polytopes(2, [tuple(sorted(r)) for r in runs])


def path_cone(c) -> Cone:
    return complex_cone(realize_path(c))


# ---------------------------------------------------------------------------
# Lattice isomorphism of cones
# ---------------------------------------------------------------------------


def iso_signature(cone: Cone):
    """Cheap lattice-isomorphism invariant: Hilbert basis size, bottom
    f-vector, and the multiset of decomposition lengths of pairwise sums
    of Hilbert basis elements."""
    hb = hilbert_basis(cone).elements
    oracle = DecompositionOracle(hb)
    pair_lengths = sorted(
        oracle.length(vadd(hb[i], hb[j]))
        for i in range(len(hb))
        for j in range(i, len(hb))
    )
    if cone.is_full_dimensional:
        bc = bottom_complex(cone)
        dims = {}
        for face in bc.faces():
            d = LatticePolytope.from_points(tuple(face)).affine_dim
            dims[d] = dims.get(d, 0) + 1
        fvec = tuple(dims.get(i, 0) for i in range(cone.dim))
    else:
        fvec = ()
    return (len(hb), fvec, tuple(pair_lengths))


def cones_lattice_isomorphic(
    c1: Cone, c2: Cone, hilbert_cap: int = 12, use_signature: bool = True
) -> UnimodularMap | None:
    """A unimodular map carrying c1 onto c2, or None.

    Searches bijections of the Hilbert bases that extend linearly; the
    signature is used to certify non-isomorphism quickly.
    """
    if c1.dim != c2.dim:
        raise DimensionMismatch("cones live in different ambient dimensions")
    if not (c1.is_full_dimensional and c2.is_full_dimensional):
        raise DimensionMismatch("isomorphism search expects full-dimensional cones")
    if (c1.extreme_rays, c1.facet_normals) == (c2.extreme_rays, c2.facet_normals):
        return UnimodularMap.identity(c1.dim)
    h1 = hilbert_basis(c1).elements
    h2 = hilbert_basis(c2).elements
    if max(len(h1), len(h2)) > hilbert_cap:
        raise CapExceeded(
            f"Hilbert bases of sizes {len(h1)}, {len(h2)} exceed the cap {hilbert_cap}"
        )
    if len(h1) != len(h2):
        return None
    if use_signature and iso_signature(c1) != iso_signature(c2):
        return None
    base = []
    for h in h1:
        if rank(mat(base + [h])) > len(base):
            base.append(h)
        if len(base) == c1.dim:
            break
    h2set = set(h2)
    for targets in permutations(h2, c1.dim):
        A = _map_matrix(base, targets, c1.dim)
        if A is None:
            continue
        from .exactlin import det as _det

        if _det(A) not in (1, -1):
            continue
        phi = UnimodularMap(A)
        if {phi.apply(h) for h in h1} == h2set:
            return phi
    return None


def _map_matrix(base, targets, dim):
    """Integer matrix A with A*base_j = targets_j, or None.

    Row i of A solves  <row, base_j> = targets_j[i]  for every j.
    """
    B = mat(base)
    rows = []
    for i in range(dim):
        rhs = tuple(t[i] for t in targets)
        x = solve(B, rhs)
        if x is None or any(xx.denominator != 1 for xx in x):
            return None
        rows.append(tuple(int(xx) for xx in x))
    return mat(rows)
