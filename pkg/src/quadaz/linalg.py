"""Small dense linear algebra over the exact domains of fieldtower.

Matrices are tuples of row tuples. Elimination routines need a field; products
and determinants by cofactor expansion work over any commutative ring.
"""

from __future__ import annotations

from .errors import NotInvertible


def mat(rows):
    return tuple(tuple(r) for r in rows)


def identity(F, n):
    z, o = F.zero, F.one
    return tuple(tuple(o if i == j else z for j in range(n)) for i in range(n))


def zeros(F, n, m=None):
    m = n if m is None else m
    z = F.zero
    return tuple(tuple(z for _ in range(m)) for _ in range(n))


def transpose(A):
    return tuple(zip(*A)) if A else A


def mat_mul(A, B):
    Bt = transpose(B)
    out = []
    for row in A:
        r = []
        for col in Bt:
            acc = None
            for x, y in zip(row, col):
                if x == 0 or y == 0:
                    continue
                acc = x * y if acc is None else acc + x * y
            r.append(acc if acc is not None else row[0] * 0)
        out.append(tuple(r))
    return tuple(out)


def mat_vec(A, v):
    out = []
    for row in A:
        acc = v[0] * 0
        for x, y in zip(row, v):
            if x != 0 and y != 0:
                acc = acc + x * y
        out.append(acc)
    return tuple(out)


def mat_add(A, B):
    return tuple(tuple(x + y for x, y in zip(r, s)) for r, s in zip(A, B))


def mat_sub(A, B):
    return tuple(tuple(x - y for x, y in zip(r, s)) for r, s in zip(A, B))


def mat_scale(c, A):
    return tuple(tuple(c * x for x in r) for r in A)


def dot(v, w):
    acc = v[0] * 0
    for x, y in zip(v, w):
        acc = acc + x * y
    return acc


def bilinear(G, v, w):
    return dot(v, mat_vec(G, w))


def congruence(M, G):
    """M^T G M."""
    return mat_mul(mat_mul(transpose(M), G), M)


def block_diag(F, *blocks):
    n = sum(len(b) for b in blocks)
    out = [[F.zero] * n for _ in range(n)]
    off = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, x in enumerate(row):
                out[off + i][off + j] = x
        off += len(b)
    return mat(out)


def diag(F, entries):
    n = len(entries)
    return tuple(tuple(F.coerce(entries[i]) if i == j else F.zero for j in range(n)) for i in range(n))


def is_symmetric(A):
    return all(A[i][j] == A[j][i] for i in range(len(A)) for j in range(i))


def det(A):
    """Determinant by Gaussian elimination; cofactor expansion when a pivot
    is not invertible (dual numbers)."""
    n = len(A)
    if n == 0:
        return None
    try:
        M = [list(r) for r in A]
        d = M[0][0] * 0 + 1
        for c in range(n):
            piv = next((r for r in range(c, n) if M[r][c] != 0), None)
            if piv is None:
                return M[0][0] * 0
            if piv != c:
                M[c], M[piv] = M[piv], M[c]
                d = -d
            inv = 1 / M[c][c]
            d = d * M[c][c]
            for r in range(c + 1, n):
                f = M[r][c] * inv
                if f != 0:
                    M[r] = [x - f * y for x, y in zip(M[r], M[c])]
        return d
    except NotInvertible:
        return det_cofactor(A)


def det_cofactor(A):
    n = len(A)
    if n == 1:
        return A[0][0]
    if n == 2:
        return A[0][0] * A[1][1] - A[0][1] * A[1][0]
    acc = None
    for j in range(n):
        if A[0][j] == 0:
            continue
        minor = tuple(tuple(r[k] for k in range(n) if k != j) for r in A[1:])
        term = A[0][j] * det_cofactor(minor)
        if j % 2:
            term = -term
        acc = term if acc is None else acc + term
    return acc if acc is not None else A[0][0] * 0


def rref(A):
    """Reduced row echelon form and pivot columns (field entries)."""
    M = [list(r) for r in A]
    rows = len(M)
    cols = len(M[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = 1 / M[r][c]
        M[r] = [x * inv for x in M[r]]
        for i in range(rows):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return M, pivots


def rank(A):
    if not A:
        return 0
    return len(rref(A)[1])


def nullspace(A, F):
    """Basis of {x : A x = 0}, one vector per free column, in column order."""
    cols = len(A[0])
    M, pivots = rref(A)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = [F.zero] * cols
        v[f] = F.one
        for i, p in enumerate(pivots):
            v[p] = -M[i][f]
        basis.append(tuple(v))
    return basis


def inverse(A, F):
    n = len(A)
    aug = [list(r) + [F.one if i == j else F.zero for j in range(n)] for i, r in enumerate(A)]
    M, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise NotInvertible("singular matrix")
    return tuple(tuple(r[n:]) for r in M)


def solve(A, b, F):
    """One solution x of A x = b, or None."""
    aug = [list(r) + [bi] for r, bi in zip(A, b)]
    cols = len(A[0])
    M, pivots = rref(aug)
    if cols in pivots:
        return None
    x = [F.zero] * cols
    for i, p in enumerate(pivots):
        x[p] = M[i][cols]
    return tuple(x)


def fmt_matrix(F, A) -> str:
    return "[" + ", ".join("[" + ", ".join(F.fmt(x) for x in r) + "]" for r in A) + "]"
