"""The matrix criterion for reduced conic realizations of simplicial discs:
matrix -> embedding and embedding -> matrix."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product

from . import caps
from .bottomcx import EmbeddedComplex, VerificationReport, verify_reduced_bottom
from .errors import (
    CapExceeded,
    InconsistentPropagation,
    InputError,
    NonIntegralRelation,
    NotADisc,
    NotInSpan,
    PatternViolation,
)
from .exactlin import det, mat, solve, vadd, vec, vscale

Vertex = int


@dataclass(frozen=True)
class AbstractSimplicialComplex:
    """Facet list on vertices 1..n; faces are the subsets of facets."""

    n: int
    facets: tuple[tuple[Vertex, ...], ...]

    def __post_init__(self):
        object.__setattr__(
            self, "facets", tuple(sorted(tuple(sorted(f)) for f in self.facets))
        )

    def has_face(self, vertices) -> bool:
        s = set(vertices)
        return any(s <= set(f) for f in self.facets)


@dataclass(frozen=True)
class DiscComplex:
    """A pure 2-dimensional simplicial disc with its interior-edge table."""

    complex: AbstractSimplicialComplex
    interior_edges: tuple[tuple[int, int, int, int], ...]  # (k, l, i, j), k<l, i<j
    boundary_vertices: frozenset[int]
    boundary_cycle: tuple[int, ...]

    @property
    def n(self) -> int:
        return self.complex.n

    @property
    def m(self) -> int:
        return len(self.interior_edges)


def analyze_disc(delta: AbstractSimplicialComplex) -> DiscComplex:
    """Interior-edge table and boundary of a simplicial disc; NotADisc with
    the failing test otherwise."""
    facets = delta.facets
    if not facets or any(len(f) != 3 for f in facets):
        raise NotADisc("complex is not pure 2-dimensional")
    used = {v for f in facets for v in f}
    if used != set(range(1, delta.n + 1)):
        raise NotADisc("vertex labels must be exactly 1..n")
    edge_facets: dict[tuple[int, int], list] = {}
    for f in facets:
        a, b, c = f
        for e in ((a, b), (a, c), (b, c)):
            edge_facets.setdefault(e, []).append(f)
    if any(len(fs) > 2 for fs in edge_facets.values()):
        raise NotADisc("an edge lies in more than two triangles")
    # connectivity of the facet adjacency graph
    adj = {f: set() for f in facets}
    for e, fs in edge_facets.items():
        if len(fs) == 2:
            adj[fs[0]].add(fs[1])
            adj[fs[1]].add(fs[0])
    seen = {facets[0]}
    stack = [facets[0]]
    while stack:
        for g in adj[stack.pop()]:
            if g not in seen:
                seen.add(g)
                stack.append(g)
    if len(seen) != len(facets):
        raise NotADisc("triangles are not edge-connected")
    euler = len(used) - len(edge_facets) + len(facets)
    if euler != 1:
        raise NotADisc(f"Euler characteristic is {euler}, not 1")
    boundary_edges = [e for e, fs in edge_facets.items() if len(fs) == 1]
    boundary_vertices = {v for e in boundary_edges for v in e}
    nbrs: dict[int, list[int]] = {}
    for a, b in boundary_edges:
        nbrs.setdefault(a, []).append(b)
        nbrs.setdefault(b, []).append(a)
    if any(len(v) != 2 for v in nbrs.values()):
        raise NotADisc("boundary edges do not form a simple cycle")
    start = min(boundary_vertices)
    cycle = [start]
    prev = None
    while True:
        cur = cycle[-1]
        nxt = [q for q in nbrs[cur] if q != prev]
        step = min(nxt) if prev is None else nxt[0]
        if step == start:
            break
        prev = cur
        cycle.append(step)
        if len(cycle) > len(boundary_vertices):
            raise NotADisc("boundary edges do not form a single cycle")
    if len(cycle) != len(boundary_vertices):
        raise NotADisc("boundary edges form more than one cycle")
    for v in used:
        _check_link(v, facets, v in boundary_vertices)
    interior = []
    for (a, b), fs in sorted(edge_facets.items()):
        if len(fs) == 2:
            i = next(x for x in fs[0] if x not in (a, b))
            j = next(x for x in fs[1] if x not in (a, b))
            i, j = min(i, j), max(i, j)
            interior.append((a, b, i, j))
    return DiscComplex(
        complex=delta,
        interior_edges=tuple(interior),
        boundary_vertices=frozenset(boundary_vertices),
        boundary_cycle=tuple(cycle),
    )


def _check_link(v, facets, on_boundary):
    """Vertex links must be simple paths (boundary) or cycles (interior)."""
    link_edges = [tuple(x for x in f if x != v) for f in facets if v in f]
    degree: dict[int, int] = {}
    for a, b in link_edges:
        degree[a] = degree.get(a, 0) + 1
        degree[b] = degree.get(b, 0) + 1
    odd = [w for w, d in degree.items() if d == 1]
    if any(d > 2 for d in degree.values()):
        raise NotADisc(f"link of vertex {v} is not a simple path or cycle")
    if on_boundary and len(odd) != 2:
        raise NotADisc(f"link of boundary vertex {v} is not a path")
    if not on_boundary and odd:
        raise NotADisc(f"link of interior vertex {v} is not a cycle")
    # connectivity of the link
    nodes = set(degree)
    seen = set()
    stack = [next(iter(nodes))]
    seen.add(stack[0])
    neighbors: dict[int, set] = {}
    for a, b in link_edges:
        neighbors.setdefault(a, set()).add(b)
        neighbors.setdefault(b, set()).add(a)
    while stack:
        for q in neighbors[stack.pop()]:
            if q not in seen:
                seen.add(q)
                stack.append(q)
    if seen != nodes:
        raise NotADisc(f"link of vertex {v} is disconnected")


@dataclass(frozen=True)
class MDelta:
    """Integer relation matrix of a simplicial disc: one row per interior
    edge (k, l) with unit entries at the opposite vertices and the (lambda,
    mu) slots at k and l."""

    disc: DiscComplex
    lambdas: tuple[int, ...]  # per interior edge, coefficient at k
    mus: tuple[int, ...]      # per interior edge, coefficient at l

    def __post_init__(self):
        if len(self.lambdas) != self.disc.m or len(self.mus) != self.disc.m:
            raise PatternViolation("one (lambda, mu) pair per interior edge required")

    @cached_property
    def entries(self):
        rows = []
        for row_i, (k, l, i, j) in enumerate(self.disc.interior_edges):
            row = [0] * self.disc.n
            row[i - 1] += 1
            row[j - 1] += 1
            row[k - 1] += self.lambdas[row_i]
            row[l - 1] += self.mus[row_i]
            rows.append(tuple(row))
        return tuple(rows)


def mdelta_check(m: MDelta) -> bool:
    return not mdelta_check_report(m)


def mdelta_check_report(m: MDelta):
    """Failing clauses as a list of dicts (empty when the matrix passes)."""
    from .exactlin import rank

    failures = []
    boundary = m.disc.boundary_vertices
    for row_i, (k, l, _i, _j) in enumerate(m.disc.interior_edges):
        lam, mu = m.lambdas[row_i], m.mus[row_i]
        if lam + mu > -3:
            failures.append(
                {"clause": "a", "edge": [k, l], "witness": f"lambda+mu = {lam + mu} > -3"}
            )
        if l in boundary and lam >= 0:
            failures.append(
                {"clause": "b", "edge": [k, l], "witness": f"lambda = {lam} not < 0"}
            )
        if k in boundary and mu >= 0:
            failures.append(
                {"clause": "b", "edge": [k, l], "witness": f"mu = {mu} not < 0"}
            )
    r = rank(m.entries)
    if r != m.disc.n - 3:
        failures.append(
            {"clause": "c", "edge": [], "witness": f"rank {r} != n-3 = {m.disc.n - 3}"}
        )
    return failures


def mdelta_realize(m: MDelta):
    """(embedding, report) for a matrix that passes mdelta_check.

    Seeds the lexicographically first facet at the unit basis, propagates
    over the dual graph, verifies all relations, unimodularity of all
    triangles, and the reduced-bottom property."""
    disc = m.disc
    facets = disc.complex.facets
    coords: dict[int, tuple] = {}
    seed = facets[0]
    basis = ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    for v, e in zip(seed, basis):
        coords[v] = e
    edge_rows = {
        (k, l): (row_i, i, j) for row_i, (k, l, i, j) in enumerate(disc.interior_edges)
    }
    progress = True
    while progress and len(coords) < disc.n:
        progress = False
        for (k, l), (row_i, i, j) in edge_rows.items():
            known = [v for v in (i, j, k, l) if v in coords]
            if k not in coords or l not in coords:
                continue
            for unknown, other in ((i, j), (j, i)):
                if unknown not in coords and other in coords:
                    lam, mu = m.lambdas[row_i], m.mus[row_i]
                    val = vscale(-1, coords[other])
                    val = vadd(val, vscale(-lam, coords[k]))
                    val = vadd(val, vscale(-mu, coords[l]))
                    coords[unknown] = val
                    progress = True
    if len(coords) < disc.n:
        raise InconsistentPropagation("dual graph propagation did not reach every vertex")
    residuals = []
    for row_i, (k, l, i, j) in enumerate(disc.interior_edges):
        r = vadd(coords[i], coords[j])
        r = vadd(r, vscale(m.lambdas[row_i], coords[k]))
        r = vadd(r, vscale(m.mus[row_i], coords[l]))
        if r != (0, 0, 0):
            residuals.append(((k, l), r))
    if residuals:
        raise InconsistentPropagation(f"nonzero relation residuals: {residuals}")
    for f in facets:
        if det(mat([coords[v] for v in f])) not in (1, -1):
            return None, VerificationReport(
                status="fail",
                violations=(
                    {
                        "clause": "unimodularity",
                        "facet": [list(coords[v]) for v in f],
                        "witness": [],
                    },
                ),
            )
    embedding = EmbeddedComplex(
        ambient_dim=3,
        vertices={str(v): coords[v] for v in range(1, disc.n + 1)},
        facets=tuple(tuple(str(v) for v in f) for f in facets),
    )
    report = verify_reduced_bottom(embedding)
    if not report.ok:
        return None, report
    return embedding, report


def mdelta_to_embedding(m: MDelta) -> EmbeddedComplex | None:
    embedding, _report = mdelta_realize(m)
    return embedding


def embedding_to_mdelta(disc: DiscComplex, coords: dict[int, tuple]) -> MDelta:
    """Solve the unique (lambda, mu) for each interior edge of an embedding."""
    lambdas = []
    mus = []
    for k, l, i, j in disc.interior_edges:
        rhs = vscale(-1, vadd(vec(coords[i]), vec(coords[j])))
        system = tuple(zip(vec(coords[k]), vec(coords[l])))
        sol = solve(system, rhs)
        if sol is None:
            raise NotInSpan(f"[{i}]+[{j}] is not in the span of [{k}], [{l}]")
        if any(x.denominator != 1 for x in sol):
            raise NonIntegralRelation(f"edge ({k},{l}) solves with non-integer coefficients")
        lambdas.append(int(sol[0]))
        mus.append(int(sol[1]))
    return MDelta(disc=disc, lambdas=tuple(lambdas), mus=tuple(mus))


def search_mdelta(disc: DiscComplex, lambda_bound: int, node_cap: int | None = None):
    """Bounded scan over |lambda|, |mu| <= bound, with rank pruning.

    Yields matrices that pass mdelta_check; intended for small discs."""
    from .exactlin import rank

    cap = node_cap if node_cap is not None else caps.get_cap()
    boundary = disc.boundary_vertices
    budget = [0]

    def choices(row_i):
        k, l, *_ = disc.interior_edges[row_i]
        for lam in range(-lambda_bound, lambda_bound + 1):
            if l in boundary and lam >= 0:
                continue
            for mu in range(-lambda_bound, lambda_bound + 1):
                if k in boundary and mu >= 0:
                    continue
                if lam + mu > -3:
                    continue
                yield lam, mu

    def rec(row_i, lams, mus):
        budget[0] += 1
        if budget[0] > cap:
            raise CapExceeded("matrix search exceeded the node cap")
        if row_i == disc.m:
            m = MDelta(disc=disc, lambdas=tuple(lams), mus=tuple(mus))
            if mdelta_check(m):
                yield m
            return
        for lam, mu in choices(row_i):
            partial = MDelta(
                disc=disc,
                lambdas=tuple(lams + [lam] + [0] * (disc.m - row_i - 1)),
                mus=tuple(mus + [mu] + [0] * (disc.m - row_i - 1)),
            )
            if rank(partial.entries[: row_i + 1]) > disc.n - 3:
                continue
            yield from rec(row_i + 1, lams + [lam], mus + [mu])

    yield from rec(0, [], [])
