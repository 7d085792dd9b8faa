"""Exact integer linear systems via column Hermite-style reduction."""


def _xgcd(a, b):
    """Return (g, s, t) with g = s*a + t*b = gcd(a, b) >= 0."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        return -a, -s0, -t0
    return a, s0, t0


def solve_integer(A, b):
    """Find an integer vector z with A z = b, or return None.

    ``A`` is a list of m rows of length N.  Unimodular column operations bring
    ``A`` to column echelon form ``H = A U``; ``H y = b`` is then solved by
    forward substitution and ``z = U y``.
    """
    m = len(A)
    N = len(A[0]) if m else 0
    if len(b) != m:
        raise ValueError("right-hand side has wrong length")
    H = [list(row) for row in A]
    # U is stored column-major as a list of columns for cheap column ops.
    U = [[1 if i == j else 0 for i in range(N)] for j in range(N)]

    def colop(j, k, a, bb, c, d):
        # (col_j, col_k) <- (a col_j + bb col_k, c col_j + d col_k)
        for r in range(m):
            x, y = H[r][j], H[r][k]
            H[r][j], H[r][k] = a * x + bb * y, c * x + d * y
        uj, uk = U[j], U[k]
        U[j] = [a * x + bb * y for x, y in zip(uj, uk)]
        U[k] = [c * x + d * y for x, y in zip(uj, uk)]

    pivots = []  # (row, col)
    col = 0
    for r in range(m):
        if col >= N:
            break
        for k in range(col + 1, N):
            if H[r][k] == 0:
                continue
            x, y = H[r][col], H[r][k]
            g, s, t = _xgcd(x, y)
            # [s, -y/g; t, x/g] has determinant 1
            colop(col, k, s, t, -y // g, x // g)
        if H[r][col] != 0:
            pivots.append((r, col))
            col += 1

    y = [0] * N
    pivot_of_row = dict(pivots)
    for r in range(m):
        acc = sum(H[r][c] * y[c] for c in range(N) if H[r][c] and y[c])
        if r in pivot_of_row:
            c = pivot_of_row[r]
            # y[c] is still 0 here, so acc excludes the pivot column.
            rem = b[r] - acc
            q, rmd = divmod(rem, H[r][c])
            if rmd:
                return None
            y[c] = q
        elif acc != b[r]:
            return None
    z = [0] * N
    for c in range(N):
        if y[c]:
            col_c = U[c]
            for i in range(N):
                z[i] += col_c[i] * y[c]
    return z
