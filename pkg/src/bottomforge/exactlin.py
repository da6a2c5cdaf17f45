"""Exact integer and rational linear algebra.

Everything runs on arbitrary-precision ints and fractions.Fraction; no
floating point anywhere.  Vectors are tuples of ints, matrices tuples of
row tuples.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import gcd

from .errors import DimensionMismatch, ZeroVector

IntVec = tuple[int, ...]
IntMat = tuple[IntVec, ...]


def vec(entries) -> IntVec:
    return tuple(int(x) for x in entries)


def mat(rows) -> IntMat:
    return tuple(vec(r) for r in rows)


def vadd(a: IntVec, b: IntVec) -> IntVec:
    return tuple(x + y for x, y in zip(a, b, strict=True))


def vsub(a: IntVec, b: IntVec) -> IntVec:
    return tuple(x - y for x, y in zip(a, b, strict=True))


def vneg(a: IntVec) -> IntVec:
    return tuple(-x for x in a)


def vscale(c, a):
    return tuple(c * x for x in a)


def dot(a, b):
    if len(a) != len(b):
        raise DimensionMismatch(f"dot: {len(a)} vs {len(b)}")
    return sum(x * y for x, y in zip(a, b))


def is_zero(v) -> bool:
    return all(x == 0 for x in v)


def gcd_vec(v: IntVec) -> int:
    g = 0
    for x in v:
        g = gcd(g, abs(x))
    return g


def primitive_vector(v: IntVec) -> IntVec:
    """v divided by the gcd of its entries; direction preserved."""
    g = gcd_vec(v)
    if g == 0:
        raise ZeroVector("cannot normalize the zero vector")
    return tuple(x // g for x in v)


def clear_denominators(v) -> IntVec:
    """Scale a rational vector to a primitive integer vector, same direction."""
    fr = [Fraction(x) for x in v]
    if all(x == 0 for x in fr):
        raise ZeroVector("cannot normalize the zero vector")
    lcm = 1
    for x in fr:
        lcm = lcm * x.denominator // gcd(lcm, x.denominator)
    return primitive_vector(tuple(int(x * lcm) for x in fr))


def identity_matrix(n: int) -> IntMat:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def transpose(A):
    return tuple(zip(*A)) if A else ()


def mat_vec(A, v):
    return tuple(dot(row, v) for row in A)


def mat_mul(A, B):
    Bt = transpose(B)
    return tuple(tuple(dot(row, col) for col in Bt) for row in A)


def det(A: IntMat) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = len(A)
    if n == 0:
        return 1
    if any(len(r) != n for r in A):
        raise DimensionMismatch("det needs a square matrix")
    M = [list(r) for r in A]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k] != 0:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
            M[i][k] = 0
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def _rref(rows):
    """Reduced row echelon form over Fraction. Returns (rows, pivot columns)."""
    R = [[Fraction(x) for x in row] for row in rows]
    m = len(R)
    n = len(R[0]) if m else 0
    pivots = []
    r = 0
    for c in range(n):
        pivot = next((i for i in range(r, m) if R[i][c] != 0), None)
        if pivot is None:
            continue
        R[r], R[pivot] = R[pivot], R[r]
        pv = R[r][c]
        R[r] = [x / pv for x in R[r]]
        for i in range(m):
            if i != r and R[i][c] != 0:
                f = R[i][c]
                R[i] = [a - f * b for a, b in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return R, pivots


def rank(A) -> int:
    if not A:
        return 0
    return len(_rref(A)[1])


def kernel_and_rank(M):
    """Exact rank and a canonical right-kernel basis over the rationals.

    The basis vectors come from the reduced echelon form: one per free
    column with a 1 in that slot, ordered by free column index.
    """
    if not M:
        raise DimensionMismatch("kernel_and_rank: empty matrix")
    n = len(M[0])
    R, pivots = _rref(M)
    pivset = set(pivots)
    free = [c for c in range(n) if c not in pivset]
    basis = []
    for fc in free:
        v = [Fraction(0)] * n
        v[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -R[r][fc]
        basis.append(tuple(v))
    return len(pivots), basis


def solve(A, b):
    """One exact solution of A x = b, or None if inconsistent."""
    if not A:
        return None
    n = len(A[0])
    aug = [list(row) + [bb] for row, bb in zip(A, b, strict=True)]
    R, pivots = _rref(aug)
    for row in R:
        if all(x == 0 for x in row[:n]) and row[n] != 0:
            return None
    x = [Fraction(0)] * n
    for r, pc in enumerate(pivots):
        if pc == n:
            return None
        x[pc] = R[r][n]
    return tuple(x)


def solve_integral(A, b):
    """Integer solution of A x = b or None (requires a unique rational one)."""
    x = solve(A, b)
    if x is None or any(xi.denominator != 1 for xi in x):
        return None
    return tuple(int(xi) for xi in x)


def hermite_normal_form(M: IntMat):
    """Left-transform Hermite form: returns (H, U) with U*M = H, det(U) = +-1.

    H is in row echelon shape with positive pivots and entries above each
    pivot reduced into [0, pivot).
    """
    if not M:
        raise DimensionMismatch("hermite_normal_form: empty matrix")
    m = len(M)
    n = len(M[0])
    H = [list(r) for r in M]
    U = [list(r) for r in identity_matrix(m)]

    def rowop(i, j, q):
        H[i] = [a - q * b for a, b in zip(H[i], H[j])]
        U[i] = [a - q * b for a, b in zip(U[i], U[j])]

    pr = 0
    for col in range(n):
        while True:
            nz = [i for i in range(pr, m) if H[i][col] != 0]
            if not nz:
                break
            j = min(nz, key=lambda i: (abs(H[i][col]), i))
            if j != pr:
                H[pr], H[j] = H[j], H[pr]
                U[pr], U[j] = U[j], U[pr]
            below = [i for i in range(pr + 1, m) if H[i][col] != 0]
            if not below:
                break
            for i in below:
                rowop(i, pr, H[i][col] // H[pr][col])
        if pr < m and H[pr][col] != 0:
            if H[pr][col] < 0:
                H[pr] = [-a for a in H[pr]]
                U[pr] = [-a for a in U[pr]]
            for i in range(pr):
                q = H[i][col] // H[pr][col]
                if q:
                    rowop(i, pr, q)
            pr += 1
            if pr == m:
                break
    return mat(H), mat(U)


def integer_kernel(M: IntMat):
    """Basis (rows) of the saturated lattice {x in Z^n : M x = 0}."""
    if not M:
        raise DimensionMismatch("integer_kernel: empty matrix")
    Ht, U = hermite_normal_form(transpose(M))
    return tuple(U[i] for i in range(len(Ht)) if is_zero(Ht[i]))


def saturation_basis(vectors):
    """Lattice basis (rows) of span(vectors) intersected with Z^n."""
    vectors = [v for v in vectors if not is_zero(v)]
    if not vectors:
        return ()
    n = len(vectors[0])
    forms = integer_kernel(mat(vectors))
    if not forms:
        return identity_matrix(n)
    return integer_kernel(mat(forms))


def coordinates_in_basis(v, basis):
    """Exact coordinates of v in the given row basis, or None."""
    return solve(transpose(basis), v)


def diagonalize_integer(M: IntMat):
    """Unimodular U, V and diagonal D with U*M*V = D (no divisibility chain)."""
    m = len(M)
    n = len(M[0]) if m else 0
    D = [list(r) for r in M]
    U = [list(r) for r in identity_matrix(m)]
    V = [list(r) for r in identity_matrix(n)]

    def rowop(i, j, q):
        D[i] = [a - q * b for a, b in zip(D[i], D[j])]
        U[i] = [a - q * b for a, b in zip(U[i], U[j])]

    def colop(i, j, q):
        for row in D:
            row[i] -= q * row[j]
        for row in V:
            row[i] -= q * row[j]

    for k in range(min(m, n)):
        while True:
            cand = [(abs(D[i][j]), i, j) for i in range(k, m)
                    for j in range(k, n) if D[i][j] != 0]
            if not cand:
                break
            _, pi, pj = min(cand)
            if pi != k:
                D[k], D[pi] = D[pi], D[k]
                U[k], U[pi] = U[pi], U[k]
            if pj != k:
                for row in D:
                    row[k], row[pj] = row[pj], row[k]
                for row in V:
                    row[k], row[pj] = row[pj], row[k]
            done = True
            for i in range(k + 1, m):
                if D[i][k] != 0:
                    rowop(i, k, D[i][k] // D[k][k])
                    done = done and D[i][k] == 0
            for j in range(k + 1, n):
                if D[k][j] != 0:
                    q = D[k][j] // D[k][k]
                    colop(j, k, q)
                    done = done and D[k][j] == 0
            if done:
                break
    return mat(D), mat(U), mat(V)


def unimodular_inverse(U: IntMat) -> IntMat:
    """Exact inverse of a determinant +-1 integer matrix (adjugate method)."""
    n = len(U)
    d = det(U)
    if d not in (1, -1):
        raise DimensionMismatch("matrix is not unimodular")
    if n == 1:
        return ((d,),)
    adj = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [[U[r][c] for c in range(n) if c != j]
                     for r in range(n) if r != i]
            adj[j][i] = (-1) ** (i + j) * det(mat(minor))
    return mat([[x * d for x in row] for row in adj])


def is_part_of_lattice_basis(rows) -> bool:
    """Do the rows extend to a basis of Z^n (all invariant factors 1)?"""
    rows = mat(rows)
    k = len(rows)
    if k == 0:
        return True
    n = len(rows[0])
    if k > n or rank(rows) < k:
        return False
    g = 0
    for cols in combinations(range(n), k):
        sub = mat([[row[c] for c in cols] for row in rows])
        g = gcd(g, abs(det(sub)))
        if g == 1:
            return True
    return g == 1


def complete_to_unimodular(rows) -> IntMat:
    """Extend rows (a part of a Z^n-basis) to a square unimodular matrix."""
    rows = mat(rows)
    k = len(rows)
    n = len(rows[0])
    if k == n:
        return rows
    _, _, V = diagonalize_integer(rows)
    Vinv = unimodular_inverse(V)
    full = list(rows) + [Vinv[i] for i in range(k, n)]
    if abs(det(mat(full))) != 1:
        raise DimensionMismatch("rows are not part of a lattice basis")
    return mat(full)


@dataclass(frozen=True)
class UnimodularMap:
    """An affine automorphism of Z^d: x -> matrix*x + translation."""

    matrix: IntMat
    translation: IntVec | None = None

    def __post_init__(self):
        if det(self.matrix) not in (1, -1):
            raise DimensionMismatch("determinant must be +-1")

    @property
    def dim(self) -> int:
        return len(self.matrix)

    def apply(self, v: IntVec) -> IntVec:
        w = mat_vec(self.matrix, v)
        if self.translation is not None:
            w = vadd(w, self.translation)
        return w

    def compose(self, other: "UnimodularMap") -> "UnimodularMap":
        """self after other."""
        m = mat_mul(self.matrix, other.matrix)
        t = other.translation
        s = self.translation
        if t is None and s is None:
            return UnimodularMap(m)
        tt = mat_vec(self.matrix, t) if t is not None else (0,) * self.dim
        if s is not None:
            tt = vadd(tt, s)
        return UnimodularMap(m, tt)

    def inverse(self) -> "UnimodularMap":
        inv = unimodular_inverse(self.matrix)
        if self.translation is None:
            return UnimodularMap(inv)
        return UnimodularMap(inv, vneg(mat_vec(inv, self.translation)))

    @staticmethod
    def identity(d: int) -> "UnimodularMap":
        return UnimodularMap(identity_matrix(d))
