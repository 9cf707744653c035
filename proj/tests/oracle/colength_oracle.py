#!/usr/bin/env python3
"""Independent colength oracle.

Computes dim_F P/(f, g_1, ..., g_k) for P = F_p[x_1..x_s] degree by degree,
treating the hypersurface relation f as one more generator of an ideal in the
polynomial ring. No normal forms, no hypersurface monomial bases: every graded
piece is dim P_m minus the rank of the full generator map into P_m.

Used once to freeze expected values into the C++ test suites.
"""
import itertools
import sys

import numpy as np


def monomials(s, m):
    if m < 0:
        return []
    out = []
    for c in itertools.combinations_with_replacement(range(s), m):
        e = [0] * s
        for v in c:
            e[v] += 1
        out.append(tuple(e))
    return out


def poly_pow(poly, k, p):
    res = {tuple([0] * len(next(iter(poly)))): 1}
    for _ in range(k):
        nxt = {}
        for a, ca in res.items():
            for b, cb in poly.items():
                mono = tuple(x + y for x, y in zip(a, b))
                nxt[mono] = (nxt.get(mono, 0) + ca * cb) % p
        res = {k2: v for k2, v in nxt.items() if v}
    return res


def rank_mod_p(mat, p):
    a = mat.copy() % p
    rows, cols = a.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        piv = np.nonzero(a[r:, c])[0]
        if piv.size == 0:
            continue
        i = r + piv[0]
        if i != r:
            a[[r, i]] = a[[i, r]]
        inv = pow(int(a[r, c]), p - 2, p)
        a[r] = (a[r] * inv) % p
        nz = np.nonzero(a[:, c])[0]
        nz = nz[nz != r]
        if nz.size:
            a[nz] = (a[nz] - np.outer(a[nz, c], a[r])) % p
        r += 1
    return r


def colength(s, p, gens):
    """gens: list of (dict monomial->coef, degree). Returns per-degree dims."""
    dims = []
    m = 0
    while True:
        rows = monomials(s, m)
        index = {mono: i for i, mono in enumerate(rows)}
        cols = []
        for g, e in gens:
            for mono in monomials(s, m - e):
                col = np.zeros(len(rows), dtype=np.int64)
                for t, c in g.items():
                    col[index[tuple(x + y for x, y in zip(t, mono))]] = c
                cols.append(col)
        rk = rank_mod_p(np.array(cols).T, p) if cols else 0
        dims.append(len(rows) - rk)
        if dims[-1] == 0:
            return dims
        m += 1


def var(s, i):
    e = [0] * s
    e[i] = 1
    return tuple(e)


def fermat(s, d):
    return {tuple(d if j == i else 0 for j in range(s)): 1 for i in range(s)}


def max_ideal_frob(s, q):
    return [({tuple(q if j == i else 0 for j in range(s)): 1}, q) for i in range(s)]


def report(label, s, p, relation, d, q):
    gens = [(relation, d)] + max_ideal_frob(s, q)
    dims = colength(s, p, gens)
    print(f"{label}: total={sum(dims)} dims={dims}")


if __name__ == "__main__":
    which = sys.argv[1] if len(sys.argv) > 1 else "all"
    if which in ("all", "fermat"):
        for p, n in [(3, 1), (3, 2), (5, 1), (7, 1), (11, 1), (13, 1), (17, 1), (23, 1)]:
            report(f"fermat_quartic p={p} n={n}", 3, p, fermat(3, 4), 4, p ** n)
    if which in ("all", "diag"):
        for p, n in [(5, 1), (5, 2), (7, 1), (13, 1)]:
            report(f"diag222 p={p} n={n}", 3, p, fermat(3, 2), 2, p ** n)
        for p in (3, 5):
            report(f"diag2222 p={p} n=1", 4, p, fermat(4, 2), 2, p)
        report("diag22 p=5 n=1", 2, 5, fermat(2, 2), 2, 5)
    if which in ("all", "chang"):
        for n in (1, 2):
            report(f"chang p=3 n={n}", 4, 3, fermat(4, 4), 4, 3 ** n)
