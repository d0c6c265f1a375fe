"""Deliberately naive brute-force ground truths for property tests.

This module imports only type definitions from the rest of the package,
never solver logic: the whole point is that these scans share no code with
the paths they check.  Enumeration is exhaustive over the full residue
grid; answers are canonical (lexicographically first hit).
"""
from __future__ import annotations

import math
from collections.abc import Sequence

import numpy as np

from .congruence import QdSolution
from .errors import ResourceExhausted
from .lattices import IntegerLattice

_ORACLE_ELL_LIMIT = 10_000
_ORACLE_MU_LIMIT = 3
_ORACLE_GRID_LIMIT = 20_000_000
_ORACLE_ORDER_LIMIT = 10_000


def brute_force_solve(
    q_form: Sequence[Sequence[int]], b: int, ell: int
) -> QdSolution | None:
    """Exhaustive scan of Q(x) = b*d**2 (mod ell) over all (x, d) with
    gcd(d, ell) = 1.  Returns the lexicographically first solution in the
    tuple order (x_1, ..., x_mu, d), or None when unsolvable.
    """
    rows = [list(int(c) for c in row) for row in q_form]
    mu = len(rows)
    if ell < 1:
        raise ValueError("ell must be positive")
    if ell > _ORACLE_ELL_LIMIT or mu > _ORACLE_MU_LIMIT or ell**mu > _ORACLE_GRID_LIMIT:
        raise ResourceExhausted(f"oracle enumeration budget exceeded for ell={ell}, mu={mu}")
    if ell == 1:
        return QdSolution((0,) * mu, 1)

    # smallest unit d realizing each attainable value of b*d^2 mod ell
    first_unit: dict[int, int] = {}
    for d in range(ell):
        if math.gcd(d, ell) != 1:
            continue
        val = b * d * d % ell
        if val not in first_unit:
            first_unit[val] = d

    grids = np.meshgrid(*([np.arange(ell, dtype=np.int64)] * mu), indexing="ij")
    total = np.zeros((ell,) * mu, dtype=np.int64)
    for i in range(mu):
        total = (total + (rows[i][i] % ell) * (grids[i] * grids[i] % ell)) % ell
        for j in range(i + 1, mu):
            total = (total + (2 * rows[i][j] % ell) * (grids[i] * grids[j] % ell)) % ell
    flat = total.ravel()
    targets = np.array(sorted(first_unit), dtype=np.int64)
    mask = np.isin(flat, targets)
    hits = np.flatnonzero(mask)
    if hits.size == 0:
        return None
    idx = int(hits[0])
    x = tuple(int(c) for c in np.unravel_index(idx, (ell,) * mu))
    d = first_unit[int(flat[idx])]
    check = sum(rows[i][j] * x[i] * x[j] for i in range(mu) for j in range(mu)) - b * d * d
    assert check % ell == 0 and math.gcd(d, ell) == 1
    return QdSolution(x, d)


def brute_force_order(element: Sequence[int], ell: int, cap: int = _ORACLE_ORDER_LIMIT) -> int:
    """Order of element/ell inside (Q/Z)^rank for a free quotient group:
    the smallest k >= 1 with ell | k * c for every coordinate c."""
    if ell < 1:
        raise ValueError("ell must be positive")
    coords = [int(c) for c in element]
    for k in range(1, min(ell, cap) + 1):
        if all((k * c) % ell == 0 for c in coords):
            return k
    raise ResourceExhausted(f"no order found up to {cap}")


def brute_force_divisibility(lat: IntegerLattice, v: Sequence[int]) -> int:
    """gcd of the pairings of v against every basis vector, written as an
    explicit double loop so it shares no structure with the main path."""
    if len(v) != lat.rank:
        raise ValueError("vector length mismatch")
    if not any(v):
        raise ValueError("divisibility of the zero vector is undefined")
    g = 0
    for i in range(lat.rank):
        basis = [1 if j == i else 0 for j in range(lat.rank)]
        val = 0
        for a in range(lat.rank):
            for bb in range(lat.rank):
                val += v[a] * lat.gram[a][bb] * basis[bb]
        g = math.gcd(g, val)
    return g
