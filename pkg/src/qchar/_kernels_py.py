"""Pure-Python integer kernels.

Mirror of ``_kernels.pyx``; used when the compiled extension is unavailable
or when ``QCHAR_PURE=1``.  Every function works on lists of Python ints and
returns new lists.
"""


def convolve(a, b, n):
    """Truncated product: ``c[k] = sum_i a[i] * b[k - i]`` for ``k < n``."""
    out = [0] * n
    if n <= 0:
        return out
    bnz = [(j, y) for j, y in enumerate(b[:n]) if y]
    if not bnz:
        return out
    for i, x in enumerate(a[:n]):
        if not x:
            continue
        lim = n - i
        for j, y in bnz:
            if j >= lim:
                break
            out[i + j] += x * y
    return out


def inverse_unit(a, n):
    """Reciprocal of an integer series whose constant term is +1 or -1."""
    a0 = a[0]
    if a0 not in (1, -1):
        raise ValueError("leading coefficient must be a unit")
    anz = [(i, x) for i, x in enumerate(a[1:n], 1) if x]
    b = [0] * n
    if n == 0:
        return b
    b[0] = a0
    for k in range(1, n):
        s = 0
        for i, x in anz:
            if i > k:
                break
            s += x * b[k - i]
        b[k] = -a0 * s
    return b


def inverse_scaled(a, n):
    """Scaled reciprocal for an arbitrary nonzero integer constant term.

    Returns ``B`` with ``1/a = sum_k B[k] / a[0]**(k+1) q^k``.
    """
    a0 = a[0]
    if not a0:
        raise ValueError("constant term is zero")
    terms = []
    p = 1
    for i in range(1, n):
        if i < len(a) and a[i]:
            terms.append((i, a[i] * p))
        p *= a0
    b = [0] * n
    if n == 0:
        return b
    b[0] = 1
    for k in range(1, n):
        s = 0
        for i, x in terms:
            if i > k:
                break
            s += x * b[k - i]
        b[k] = -s
    return b


def power_unit(a, k, n):
    """``a**k`` for an integer series with ``a[0] == 1`` and integer ``k``.

    J.C.P. Miller's recurrence; every division is exact.
    """
    if a[0] != 1:
        raise ValueError("constant term must be 1")
    anz = [(j, x) for j, x in enumerate(a[1:n], 1) if x]
    g = [0] * n
    if n == 0:
        return g
    g[0] = 1
    k1 = k + 1
    for m in range(1, n):
        s = 0
        for j, x in anz:
            if j > m:
                break
            s += (k1 * j - m) * x * g[m - j]
        g[m] = s // m
    return g


def geometric_update(grid, width, depth, sigma, e, reps):
    """Multiply a bivariate grid by ``(1 - zeta**sigma * t**e)**(-reps)`` in place.

    ``grid`` is a flat row-major list of ``width`` charge rows by ``depth``
    t-degrees; ``sigma`` is a nonzero charge.  Terms leaving the window are
    dropped, so callers must size the window to contain every reachable charge.
    """
    if sigma == 0:
        raise ValueError("sigma must be nonzero")
    for _ in range(reps):
        if sigma > 0:
            rows = range(sigma, width)
        else:
            rows = range(width - 1 + sigma, -1, -1)
        for j in rows:
            src = (j - sigma) * depth
            dst = j * depth
            for d in range(e, depth):
                v = grid[src + d - e]
                if v:
                    grid[dst + d] += v
    return grid
