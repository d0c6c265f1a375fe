"""Even integer lattices and the rank-23 K3[n] lattice.

The K3[n] lattice is U + U + U + E8(-1) + E8(-1) + <2-2n> with a fixed
basis order (the three hyperbolic planes first, then the two E8(-1) blocks,
then the exceptional generator delta last), so that vectors in scenario
files are portable.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from collections.abc import Sequence

from .arith import content
from .errors import ResourceExhausted
from .intlinalg import Mat, Vec, block_diag, det, mat, mat_vec, right_kernel_basis

U_GRAM: Mat = ((0, 1), (1, 0))

# E8 Cartan matrix; chain 1-3-4-5-6-7-8 with node 2 attached to node 4.
_E8_EDGES = ((0, 2), (1, 3), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7))
E8_GRAM: Mat = mat(
    [
        [2 if i == j else (-1 if (min(i, j), max(i, j)) in _E8_EDGES else 0) for j in range(8)]
        for i in range(8)
    ]
)
E8_MINUS_GRAM: Mat = mat([[-x for x in row] for row in E8_GRAM])

K3N_RANK = 23
HYPERBOLIC_OFFSETS = (0, 2, 4)
DELTA_INDEX = 22


@dataclass(frozen=True)
class IntegerLattice:
    """A finite-rank even lattice given by its Gram matrix."""

    gram: Mat

    def __post_init__(self):
        g = self.gram
        n = len(g)
        if n == 0 or any(len(row) != n for row in g):
            raise ValueError("gram must be square and nonempty")
        for i in range(n):
            if g[i][i] % 2 != 0:
                raise ValueError(f"diagonal entry gram[{i}][{i}]={g[i][i]} is odd")
            for j in range(i):
                if g[i][j] != g[j][i]:
                    raise ValueError("gram must be symmetric")
        if det(g) == 0:
            raise ValueError("gram is degenerate")

    @property
    def rank(self) -> int:
        return len(self.gram)

    def basis_vector(self, i: int) -> Vec:
        return tuple(int(j == i) for j in range(self.rank))

    def zero(self) -> Vec:
        return (0,) * self.rank


@lru_cache(maxsize=None)
def build_k3n_lattice(n: int) -> IntegerLattice:
    """The rank-23 lattice U^3 + E8(-1)^2 + <2-2n>, n >= 2."""
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    gram = block_diag(U_GRAM, U_GRAM, U_GRAM, E8_MINUS_GRAM, E8_MINUS_GRAM, ((2 - 2 * n,),))
    return IntegerLattice(gram)


def _check_vector(lat: IntegerLattice, v: Sequence[int], name: str = "vector") -> None:
    if len(v) != lat.rank:
        raise ValueError(f"{name} has length {len(v)}, lattice rank is {lat.rank}")


def pairing(lat: IntegerLattice, v: Sequence[int], w: Sequence[int]) -> int:
    """The bilinear form v . w with respect to the Gram matrix."""
    _check_vector(lat, v)
    _check_vector(lat, w)
    gw = mat_vec(lat.gram, w)
    return sum(a * b for a, b in zip(v, gw))


def norm(lat: IntegerLattice, v: Sequence[int]) -> int:
    return pairing(lat, v, v)


def divisibility(lat: IntegerLattice, v: Sequence[int]) -> int:
    """Positive generator of the pairing ideal {v . w : w in the lattice}.

    Equals the gcd of the pairings against the basis vectors.
    """
    _check_vector(lat, v)
    if not any(v):
        raise ValueError("divisibility of the zero vector is undefined")
    return content(mat_vec(lat.gram, v))


def is_primitive(lat: IntegerLattice, v: Sequence[int]) -> bool:
    """True iff the coordinates of v have gcd 1."""
    _check_vector(lat, v)
    if not any(v):
        raise ValueError("the zero vector is neither primitive nor imprimitive")
    return content(v) == 1


def k3n_point_count(lat: IntegerLattice) -> int:
    """Recover n from a lattice built by build_k3n_lattice."""
    if lat.rank != K3N_RANK:
        raise ValueError("not a K3[n] lattice: rank differs from 23")
    n = (2 - lat.gram[DELTA_INDEX][DELTA_INDEX]) // 2
    if n < 2 or lat.gram != build_k3n_lattice(n).gram:
        raise ValueError("not a K3[n] lattice: Gram layout differs")
    return n


def divisibility_bound_holds(lat: IntegerLattice, v: Sequence[int]) -> bool:
    """Whether div(v) divides 2n-2 for a primitive class v of the K3[n]
    lattice.  This holds for every primitive class (the unimodular part of
    the lattice pins the divisibility); it is kept as a tested assertion and
    as a guard inside witness construction.
    """
    n = k3n_point_count(lat)
    if not is_primitive(lat, v):
        raise ValueError("divisibility bound applies to primitive classes only")
    return (2 * n - 2) % divisibility(lat, v) == 0


def vec_add(v: Sequence[int], w: Sequence[int]) -> Vec:
    return tuple(a + b for a, b in zip(v, w))


def vec_scale(c: int, v: Sequence[int]) -> Vec:
    return tuple(c * a for a in v)


def vec_combine(*terms: tuple[int, Sequence[int]]) -> Vec:
    """Integer linear combination sum(c * v for (c, v) in terms)."""
    length = len(terms[0][1])
    out = [0] * length
    for c, v in terms:
        for i, a in enumerate(v):
            out[i] += c * a
    return tuple(out)


@dataclass(frozen=True)
class OrthogonalPair:
    """Classes (a, l) with a, l orthogonal to the two input classes and
    l . a = 1."""

    a: Vec
    l: Vec


@dataclass(frozen=True)
class PairSearchExhausted:
    """Distinguished non-error outcome: the search budget ran out."""

    radius: int
    tried: int


def _hyperbolic_blocks(lat: IntegerLattice) -> list[tuple[int, int]]:
    """Index pairs (i, j) spanning a hyperbolic plane split off the lattice."""
    g = lat.gram
    n = lat.rank
    blocks = []
    for i in range(n):
        for j in range(i + 1, n):
            if g[i][i] == 0 and g[j][j] == 0 and g[i][j] == 1:
                if all(g[i][k] == 0 and g[j][k] == 0 for k in range(n) if k not in (i, j)):
                    blocks.append((i, j))
    return blocks


def _verify_pair(lat, b, d, a, l) -> None:
    ok = (
        pairing(lat, a, b) == 0
        and pairing(lat, a, d) == 0
        and pairing(lat, l, b) == 0
        and pairing(lat, l, d) == 0
        and pairing(lat, l, a) == 1
    )
    if not ok:
        raise AssertionError("orthogonal pair candidate failed re-verification")


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, s, t) with g = gcd(a, b) >= 0 and s*a + t*b = g."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def _bezout_combination(ws: Sequence[int]) -> list[int] | None:
    """Coefficients y with sum(y_i * ws_i) == 1, or None if gcd != 1."""
    g = 0
    coeffs = [0] * len(ws)
    for idx, w in enumerate(ws):
        if w == 0:
            continue
        if g == 0:
            g = abs(w)
            coeffs[idx] = 1 if w > 0 else -1
        else:
            g, s, t = _ext_gcd(g, w)
            coeffs = [s * c for c in coeffs]
            coeffs[idx] += t
        if g == 1:
            return coeffs
    return None


def find_orthogonal_pair(
    lat: IntegerLattice,
    b: Sequence[int],
    d: Sequence[int],
    budget: int = 20000,
) -> OrthogonalPair | PairSearchExhausted:
    """Find (a, l) with a, l in {b, d}-perp and l . a = 1.

    Stage 1 takes a hyperbolic plane on which both b and d vanish, when one
    exists.  Stage 2 walks coefficient boxes of increasing radius over the
    integer kernel of the pairing-against-(b, d) map, solving exactly for l
    inside the kernel; ``budget`` caps the number of candidates for a.
    """
    _check_vector(lat, b, "b")
    _check_vector(lat, d, "d")
    if not any(b) or not any(d):
        raise ValueError("b and d must be nonzero")
    if budget < 1:
        raise ValueError("budget must be positive")

    for i, j in _hyperbolic_blocks(lat):
        if b[i] == b[j] == d[i] == d[j] == 0:
            a = lat.basis_vector(i)
            l = lat.basis_vector(j)
            _verify_pair(lat, b, d, a, l)
            return OrthogonalPair(a, l)

    rows = mat([mat_vec(lat.gram, b), mat_vec(lat.gram, d)])
    kernel = right_kernel_basis(rows)
    k = len(kernel)

    def try_candidate(a: Vec) -> OrthogonalPair | None:
        ga = mat_vec(lat.gram, a)
        ws = [sum(x * y for x, y in zip(kv, ga)) for kv in kernel]
        ys = _bezout_combination(ws)
        if ys is None:
            return None
        l = vec_combine(*((y, kv) for y, kv in zip(ys, kernel) if y != 0))
        _verify_pair(lat, b, d, a, l)
        return OrthogonalPair(a, l)

    def shell(radius: int):
        # support-1 kernel combinations with coefficient +-radius
        for i in range(k):
            for sign in (1, -1):
                yield vec_scale(sign * radius, kernel[i])
        # support-2 combinations with max coefficient magnitude == radius
        for i, j in itertools.combinations(range(k), 2):
            for ci in range(-radius, radius + 1):
                for cj in range(-radius, radius + 1):
                    if max(abs(ci), abs(cj)) != radius:
                        continue
                    yield vec_combine((ci, kernel[i]), (cj, kernel[j]))

    tried = 0
    radius = 0
    while tried < budget:
        radius += 1
        for a in shell(radius):
            tried += 1
            if tried > budget:
                return PairSearchExhausted(radius=radius, tried=tried - 1)
            found = try_candidate(a)
            if found:
                return found
    return PairSearchExhausted(radius=radius, tried=tried)
