"""Smooth Fano polytopes, their height-inequality systems, and enumeration
of regular reduced conic realizations of the stellar pyramid."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from importlib import resources
from itertools import permutations, product

from . import dd
from .bottomcx import bottom_complex, verify_reduced_bottom
from .cone import Cone, build_cone
from .errors import (
    CapExceeded,
    DegenerateAdjacency,
    DimensionMismatch,
    InputError,
    NotInSFPlus,
)
from .exactlin import (
    IntVec,
    UnimodularMap,
    clear_denominators,
    det,
    dot,
    mat,
    solve,
    vec,
)
from .monoid import LatticePolytope


@dataclass(frozen=True)
class FanoPolytope:
    """A smooth Fano polytope with canonically relabeled vertices.

    vertices[0..dim-1] are the base facet (a basis of Z^dim); facets hold
    vertex indices."""

    dim: int
    vertices: tuple[IntVec, ...]
    facets: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return len(self.vertices)

    @cached_property
    def adjacent_facet_pairs(self):
        out = []
        for i in range(len(self.facets)):
            for j in range(i + 1, len(self.facets)):
                shared = set(self.facets[i]) & set(self.facets[j])
                if len(shared) == self.dim - 1:
                    out.append((self.facets[i], self.facets[j]))
        return tuple(out)


def is_smooth_fano(p: LatticePolytope) -> FanoPolytope | None:
    """Canonical FanoPolytope, or None when a condition fails."""
    if p.affine_dim != p.ambient_dim:
        return None
    hrep = dd.polytope_hrep(p.vertices)
    if hrep.equalities:
        return None
    zero = (0,) * p.ambient_dim
    if not all(dot(a, zero) > c for a, c in hrep.inequalities):
        return None
    facets = []
    for a, c in hrep.inequalities:
        fverts = tuple(v for v in p.vertices if dot(a, v) == c)
        if len(fverts) != p.ambient_dim:
            return None
        if det(mat(fverts)) not in (1, -1):
            return None
        facets.append(fverts)
    base = min(tuple(sorted(f)) for f in facets)
    ordered = list(base) + sorted(v for v in p.vertices if v not in set(base))
    index = {v: i for i, v in enumerate(ordered)}
    facet_idx = tuple(
        sorted(tuple(sorted(index[v] for v in f)) for f in facets)
    )
    return FanoPolytope(dim=p.ambient_dim, vertices=tuple(ordered), facets=facet_idx)


@dataclass(frozen=True)
class AdjFunctional:
    """Height functional attached to an adjacent facet pair (F, G).

    vector has length n+1 (coordinate 0 is the apex height); int_vector is
    the same functional cleared to integers."""

    facet_f: tuple[int, ...]
    facet_g: tuple[int, ...]
    shared: tuple[int, ...]
    f_only: int
    g_only: int
    lambdas: dict
    vector: tuple
    int_vector: IntVec

    def value(self, xbar):
        return sum(c * x for c, x in zip(self.vector, xbar, strict=True))


def adjacency_functionals(p: FanoPolytope) -> list[AdjFunctional]:
    """One functional per unordered adjacent facet pair, solved exactly."""
    out = []
    for f, g in p.adjacent_facet_pairs:
        shared = tuple(sorted(set(f) & set(g)))
        f_only = next(i for i in f if i not in shared)
        g_only = next(i for i in g if i not in shared)
        d = p.dim
        # unknowns: lam_f, lam_g, lam_shared..., lam0
        cols = [f_only, g_only] + list(shared) + ["zero"]
        rows = []
        rhs = []
        for coord in range(d):
            row = [p.vertices[f_only][coord], p.vertices[g_only][coord]]
            row += [-p.vertices[j][coord] for j in shared]
            row += [0]
            rows.append(tuple(row))
            rhs.append(0)
        rows.append((1, 1) + (0,) * len(shared) + (0,))
        rhs.append(1)
        rows.append((0, 0) + (1,) * len(shared) + (1,))
        rhs.append(1)
        sol = solve(rows, rhs)
        if sol is None:
            raise DegenerateAdjacency(f"no functional for facets {f}, {g}")
        lam = {c: s for c, s in zip(cols, sol, strict=True)}
        vector = [Fraction(0)] * (p.n + 1)
        vector[0] = -lam["zero"]
        vector[f_only + 1] = lam[f_only]
        vector[g_only + 1] = lam[g_only]
        for j in shared:
            vector[j + 1] = -lam[j]
        out.append(
            AdjFunctional(
                facet_f=f,
                facet_g=g,
                shared=shared,
                f_only=f_only,
                g_only=g_only,
                lambdas={("apex" if k == "zero" else k): v for k, v in lam.items()},
                vector=tuple(vector),
                int_vector=clear_denominators(vector),
            )
        )
    return out


def sf_classify(p: FanoPolytope, xbar):
    """(region, in_sf_plus, in_sf_zero) for a height vector of length n+1.

    region is "SF_interior" when all functionals are strictly positive,
    "boundary" when all are nonnegative with some zero, else "outside"."""
    xbar = tuple(Fraction(x) for x in xbar)
    if len(xbar) != p.n + 1:
        raise DimensionMismatch(f"expected {p.n + 1} coordinates")
    values = [f.value(xbar) for f in adjacency_functionals(p)]
    if all(v > 0 for v in values):
        region = "SF_interior"
    elif all(v >= 0 for v in values):
        region = "boundary"
    else:
        region = "outside"
    interior = region == "SF_interior"
    in_plus = interior and xbar[0] == 0 and all(x >= 0 for x in xbar[1:])
    in_zero = (
        interior
        and all(x == 0 for x in xbar[: p.dim + 1])
        and all(x >= 0 for x in xbar[p.dim + 1 :])
    )
    return region, in_plus, in_zero


def in_sf_plus(p: FanoPolytope, xbar) -> bool:
    return sf_classify(p, xbar)[1]


def dependency_coefficients(p: FanoPolytope):
    """Integer coefficients a with v_k = sum a_i v_i over the base facet,
    for each dependent vertex k = dim .. n-1 (row per k)."""
    base = p.vertices[: p.dim]
    rows = []
    for k in range(p.dim, p.n):
        c = solve(mat(tuple(zip(*base))), p.vertices[k])
        assert c is not None and all(x.denominator == 1 for x in c)
        rows.append(tuple(int(x) for x in c))
    return tuple(rows)


def rho(p: FanoPolytope, xbar):
    """Project a lattice point of SF+ onto the SF0 slice (exact, integral)."""
    xbar = tuple(int(x) for x in xbar)
    region, plus, _zero = sf_classify(p, xbar)
    if not plus:
        raise NotInSFPlus(f"{xbar} is not an SF+ lattice point")
    coeffs = dependency_coefficients(p)
    out = [0] * (p.n + 1)
    for k in range(p.dim, p.n):
        a = coeffs[k - p.dim]
        out[k + 1] = xbar[k + 1] - sum(a[i] * xbar[i + 1] for i in range(p.dim))
    return tuple(out)


def cone_of_heights(p: FanoPolytope, xbar) -> Cone:
    """The cone over the lifted stellar ball: generators (0, x0+1) and
    (v_i, x_i+1)."""
    xbar = tuple(int(x) for x in xbar)
    if not sf_classify(p, xbar)[1]:
        raise NotInSFPlus(f"{xbar} is not an SF+ lattice point")
    gens = [(0,) * p.dim + (xbar[0] + 1,)]
    for i, v in enumerate(p.vertices):
        gens.append(v + (xbar[i + 1] + 1,))
    return build_cone(gens)


@dataclass(frozen=True)
class AutGroup:
    polytope: FanoPolytope
    elements: tuple[UnimodularMap, ...]
    permutations: tuple[tuple[int, ...], ...]  # sigma with alpha(v_i) = v_sigma(i)

    def __len__(self):
        return len(self.elements)


def aut_group(p: FanoPolytope) -> AutGroup:
    """All lattice-linear symmetries, by mapping the base facet basis to
    every facet basis and keeping the maps that permute the vertex set."""
    base = p.vertices[: p.dim]
    vert_index = {v: i for i, v in enumerate(p.vertices)}
    seen = {}
    for f in p.facets:
        for target in permutations([p.vertices[i] for i in f]):
            A = _matrix_sending(base, target)
            if A is None:
                continue
            images = [A.apply(v) for v in p.vertices]
            if set(images) != set(p.vertices):
                continue
            sigma = tuple(vert_index[img] for img in images)
            seen[A.matrix] = (A, sigma)
    elements = tuple(seen[k][0] for k in sorted(seen))
    perms = tuple(seen[k][1] for k in sorted(seen))
    return AutGroup(polytope=p, elements=elements, permutations=perms)


def _matrix_sending(base, targets):
    rows = []
    for i in range(len(base[0])):
        rhs = tuple(t[i] for t in targets)
        x = solve(mat(base), rhs)
        if x is None or any(xx.denominator != 1 for xx in x):
            return None
        rows.append(tuple(int(xx) for xx in x))
    A = mat(rows)
    if det(A) not in (1, -1):
        return None
    return UnimodularMap(A)


def star_action(p: FanoPolytope, sigma, xbar):
    """alpha * xbar = rho(alpha(xbar)) on SF0 lattice points."""
    permuted = [0] * (p.n + 1)
    permuted[0] = xbar[0]
    for i in range(p.n):
        permuted[sigma[i] + 1] = xbar[i + 1]
    return rho(p, tuple(permuted))


def enumerate_regular_realizations(p: FanoPolytope, bound: int):
    """Aut-orbit representatives of SF0 lattice points with free
    coordinates in [0, bound], each with its cone of heights.

    Returns a list of dicts {"rep", "orbit", "orbit_size", "cone"} sorted
    by representative."""
    if bound < 0:
        raise InputError("bound must be >= 0")
    free = p.n - p.dim
    if bound ** max(free, 1) > 10**7:
        raise CapExceeded("SF0 scan box too large")
    group = aut_group(p)
    found = {}
    for tail in product(range(0, bound + 1), repeat=free):
        xbar = (0,) * (p.dim + 1) + tail
        if not sf_classify(p, xbar)[2]:
            continue
        orbit = sorted({star_action(p, sigma, xbar) for sigma in group.permutations})
        rep = orbit[0]
        if rep not in found:
            found[rep] = orbit
    out = []
    for rep in sorted(found):
        out.append(
            {
                "rep": rep,
                "orbit": tuple(found[rep]),
                "orbit_size": len(found[rep]),
                "cone": cone_of_heights(p, rep),
            }
        )
    return out


def catalog() -> dict[str, LatticePolytope]:
    """Built-in smooth Fano polytopes for dimensions 1 and 2."""
    data = json.loads(
        resources.files("bottomforge").joinpath("data/fano_catalog.json").read_text()
    )
    out = {}
    for name, verts in data.items():
        out[name] = LatticePolytope.from_points([tuple(v) for v in verts])
    return out


def catalog_fano(name: str) -> FanoPolytope:
    table = catalog()
    if name not in table:
        raise InputError(f"unknown catalog polytope {name!r}; have {sorted(table)}")
    fp = is_smooth_fano(table[name])
    assert fp is not None
    return fp
