"""Canonical JSON serialization for every file format the CLI speaks.

Output is deterministic (sorted keys, fixed indentation); integers whose
magnitude exceeds 53 bits are emitted as strings so consumers relying on
IEEE doubles stay safe, and the readers coerce them back.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .bottomcx import EmbeddedComplex, VerificationReport
from .cone import Cone, build_cone
from .disc import AbstractSimplicialComplex, DiscComplex, MDelta, analyze_disc
from .errors import InputError, PatternViolation
from .exactlin import UnimodularMap
from .gluing import GluingData
from .grring import MonoidPresentation, Triangulation
from .monoid import LatticePolytope

_SAFE = 2**53 - 1


def _encode(obj):
    if isinstance(obj, bool):
        return obj
    if isinstance(obj, int):
        return str(obj) if abs(obj) > _SAFE else obj
    if isinstance(obj, Fraction):
        return str(obj.numerator) if obj.denominator == 1 else f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, (list, tuple)):
        return [_encode(x) for x in obj]
    if isinstance(obj, dict):
        return {str(k): _encode(v) for k, v in obj.items()}
    if isinstance(obj, str) or obj is None:
        return obj
    raise InputError(f"cannot serialize {type(obj).__name__}")


def canonical_dumps(obj) -> str:
    return json.dumps(_encode(obj), sort_keys=True, indent=2) + "\n"


def loads(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"invalid JSON: {e}") from e


def as_int(x) -> int:
    if isinstance(x, bool):
        raise InputError("expected an integer, got a boolean")
    if isinstance(x, int):
        return x
    if isinstance(x, str):
        try:
            return int(x)
        except ValueError as e:
            raise InputError(f"expected an integer, got {x!r}") from e
    raise InputError(f"expected an integer, got {x!r}")


def as_int_vec(x):
    if not isinstance(x, (list, tuple)):
        raise InputError(f"expected a vector, got {x!r}")
    return tuple(as_int(v) for v in x)


def as_fraction(x) -> Fraction:
    if isinstance(x, bool):
        raise InputError("expected a rational, got a boolean")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x)
        except ValueError as e:
            raise InputError(f"expected a rational, got {x!r}") from e
    raise InputError(f"expected a rational, got {x!r}")


# ---------------------------------------------------------------------------


def cone_to_json(c: Cone) -> dict:
    return {
        "dim": c.dim,
        "generators": [list(g) for g in c.generators],
        "extreme_rays": [list(r) for r in c.extreme_rays],
        "facet_normals": [list(n) for n in c.facet_normals],
    }


def cone_from_json(d) -> Cone:
    if not isinstance(d, dict) or "generators" not in d:
        raise InputError("cone JSON needs a 'generators' field")
    gens = [as_int_vec(g) for g in d["generators"]]
    if "dim" in d and gens and len(gens[0]) != as_int(d["dim"]):
        raise InputError("cone JSON 'dim' does not match the generators")
    return build_cone(gens)


def complex_to_json(k: EmbeddedComplex) -> dict:
    return {
        "dim": k.ambient_dim,
        "vertices": {v: list(p) for v, p in k.vertices.items()},
        "facets": [list(f) for f in k.facets],
    }


def complex_from_json(d, validate: bool = True) -> EmbeddedComplex:
    if not isinstance(d, dict) or "vertices" not in d or "facets" not in d:
        raise InputError("complex JSON needs 'vertices' and 'facets'")
    vertices = {str(v): as_int_vec(p) for v, p in d["vertices"].items()}
    facets = tuple(tuple(str(x) for x in f) for f in d["facets"])
    for f in facets:
        for v in f:
            if v not in vertices:
                raise InputError(f"facet references unknown vertex {v!r}")
    dim = as_int(d.get("dim", len(next(iter(vertices.values())))))
    k = EmbeddedComplex(ambient_dim=dim, vertices=vertices, facets=facets)
    if validate:
        k.validate()
    return k


def report_to_json(r: VerificationReport) -> dict:
    return {"status": r.status, "violations": list(r.violations)}


def polytope_from_json(d) -> LatticePolytope:
    if not isinstance(d, dict) or "vertices" not in d:
        raise InputError("polytope JSON needs a 'vertices' field")
    return LatticePolytope.from_points([as_int_vec(v) for v in d["vertices"]])


def unimodular_to_json(u: UnimodularMap) -> dict:
    out = {"matrix": [list(r) for r in u.matrix]}
    if u.translation is not None:
        out["translation"] = list(u.translation)
    return out


def gluing_to_json(g: GluingData) -> dict:
    return {
        "theta": unimodular_to_json(g.theta),
        "reflection_used": g.reflection_used,
        "u": list(g.u),
        "v": list(g.v),
        "w": [list(x) for x in g.w],
        "gamma": list(g.gamma),
        "h": list(g.h),
        "t": g.t,
        "t_convex": g.t_convex,
        "alpha_t": unimodular_to_json(g.alpha_t),
        "beta_t": unimodular_to_json(g.beta_t),
        "side1_map": unimodular_to_json(g.side1_map),
        "side2_map": unimodular_to_json(g.side2_map),
    }


def disc_from_json(d) -> DiscComplex:
    if not isinstance(d, dict) or "facets" not in d:
        raise InputError("disc JSON needs a 'facets' field")
    facets = tuple(tuple(as_int(v) for v in f) for f in d["facets"])
    n = as_int(d["n"]) if "n" in d else max(v for f in facets for v in f)
    return analyze_disc(AbstractSimplicialComplex(n=n, facets=facets))


def mdelta_skeleton_json(disc: DiscComplex) -> dict:
    rows = []
    for k, l, i, j in disc.interior_edges:
        rows.append({"edge": [k, l], "i": i, "j": j, "lambda": None, "mu": None})
    return {
        "n": disc.n,
        "facets": [list(f) for f in disc.complex.facets],
        "boundary": sorted(disc.boundary_vertices),
        "rows": rows,
    }


def mdelta_from_json(d):
    """(disc, lambdas, mus) with None entries preserved for search input."""
    disc = disc_from_json(d)
    rows = d.get("rows")
    if not isinstance(rows, list) or len(rows) != disc.m:
        raise PatternViolation("matrix JSON needs one row per interior edge")
    by_edge = {}
    for row in rows:
        edge = tuple(as_int(v) for v in row["edge"])
        by_edge[edge] = row
    lambdas = []
    mus = []
    for k, l, i, j in disc.interior_edges:
        row = by_edge.get((k, l))
        if row is None:
            raise PatternViolation(f"missing row for interior edge ({k},{l})")
        if "i" in row and "j" in row:
            if {as_int(row["i"]), as_int(row["j"])} != {i, j}:
                raise PatternViolation(
                    f"row ({k},{l}) lists opposite vertices {row['i']},{row['j']}, "
                    f"expected {i},{j}"
                )
        lam = row.get("lambda")
        mu = row.get("mu")
        lambdas.append(None if lam is None else as_int(lam))
        mus.append(None if mu is None else as_int(mu))
    return disc, tuple(lambdas), tuple(mus)


def mdelta_to_json(m: MDelta) -> dict:
    out = mdelta_skeleton_json(m.disc)
    for idx, row in enumerate(out["rows"]):
        row["lambda"] = m.lambdas[idx]
        row["mu"] = m.mus[idx]
    out["entries"] = [list(r) for r in m.entries]
    return out


def triangulation_from_json(d):
    """(Triangulation, support values, scale or None)."""
    if not isinstance(d, dict) or "vertices" not in d or "facets" not in d:
        raise InputError("triangulation JSON needs 'vertices' and 'facets'")
    vertices = {
        str(v): tuple(as_fraction(x) for x in p) for v, p in d["vertices"].items()
    }
    dim = as_int(d.get("dim", len(next(iter(vertices.values())))))
    tri = Triangulation(
        dim=dim,
        vertices=vertices,
        facets=tuple(tuple(str(x) for x in f) for f in d["facets"]),
    )
    if "support" not in d:
        raise InputError("triangulation JSON needs a 'support' field")
    support = {str(v): as_fraction(x) for v, x in d["support"].items()}
    if set(support) != set(vertices):
        raise InputError("support must assign a value to every vertex")
    scale = as_int(d["scale"]) if "scale" in d else None
    return tri, support, scale


def monoid_to_json(p: MonoidPresentation) -> dict:
    return {
        "dim": p.ambient_dim,
        "generators": [list(g) for g in p.generators],
        "normal": p.normal,
        "generator_of": {v: list(g) for v, g in p.generator_of.items()},
    }
