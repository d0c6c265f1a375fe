"""Solver for quadric congruences Q(x) = b*w**2 (mod N) with unit w.

The primary route per prime power follows the classical mechanism: an
F_p-rational point of {Q - b*w^2 = 0} with w != 0 that is nonsingular on
the projective quadric, lifted by Hensel iteration along a coordinate with
unit partial derivative, then combined across prime powers by CRT.

Absence of a smooth point does not imply the congruence is unsolvable
(solutions may run through the singular locus, e.g. diag(2,-10) with
3 | b), so before declaring a prime power unsolvable the solver falls back
to a complete bounded enumeration.  Exhaustive scans are vectorized with
numpy but stay exact: every value is reduced modulo N at each step.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from collections.abc import Sequence

import numpy as np

from .arith import crt_list, factorize, is_prime, legendre, prime_factors
from .errors import ResourceExhausted
from .intlinalg import Mat, Vec, det, is_symmetric, mat

_GRID_LIMIT = 30_000_000


@dataclass(frozen=True)
class QuadricProblem:
    """Q(x) = b*w**2 (mod modulus) for a symmetric non-degenerate form Q."""

    q_form: Mat
    b: int
    modulus: int

    def __post_init__(self):
        object.__setattr__(self, "q_form", mat(self.q_form))
        if not is_symmetric(self.q_form):
            raise ValueError("q_form must be symmetric")
        if det(self.q_form) == 0:
            raise ValueError("q_form must be non-degenerate")
        if self.modulus < 1:
            raise ValueError("modulus must be positive")

    @property
    def mu(self) -> int:
        return len(self.q_form)


@dataclass(frozen=True)
class QdSolution:
    """Coordinates x of the solution class and the unit w =: d."""

    x: Vec
    d: int


@dataclass(frozen=True)
class Unsolvable:
    """Verdict that no solution exists; carries the first failing prime."""

    prime: int
    reason: str = ""


def eval_form(q_form: Mat, x: Sequence[int]) -> int:
    gx = [sum(row[j] * x[j] for j in range(len(x))) for row in q_form]
    return sum(a * b for a, b in zip(x, gx))


def verify_solution(q_form: Mat, b: int, modulus: int, sol: QdSolution) -> bool:
    """Exact check of the congruence and the unit condition."""
    if len(sol.x) != len(q_form):
        return False
    lhs = eval_form(q_form, sol.x) - b * sol.d * sol.d
    return lhs % modulus == 0 and math.gcd(sol.d, modulus) == 1


def _axes(modulus: int, mu: int) -> list[np.ndarray]:
    out = []
    for i in range(mu):
        shape = [1] * mu
        shape[i] = modulus
        out.append(np.arange(modulus, dtype=np.int64).reshape(shape))
    return out


def _form_grid(q_form: Mat, modulus: int) -> np.ndarray:
    """Q(x) mod modulus over the full coordinate grid, C-contiguous so that
    flat index order is lexicographic in x."""
    mu = len(q_form)
    if modulus**mu > _GRID_LIMIT:
        raise ResourceExhausted(
            f"grid of size {modulus}^{mu} exceeds the enumeration budget"
        )
    axes = _axes(modulus, mu)
    total = np.zeros((modulus,) * mu, dtype=np.int64)
    for i in range(mu):
        c = q_form[i][i] % modulus
        if c:
            total = (total + c * (axes[i] * axes[i] % modulus)) % modulus
    for i in range(mu):
        for j in range(i + 1, mu):
            c = 2 * q_form[i][j] % modulus
            if c:
                total = (total + c * (axes[i] * axes[j] % modulus)) % modulus
    return total


def _gradient_nonzero_grid(q_form: Mat, modulus: int) -> np.ndarray:
    """Boolean grid marking x with 2*Q*x != 0 (mod modulus)."""
    mu = len(q_form)
    axes = _axes(modulus, mu)
    mask = np.zeros((modulus,) * mu, dtype=bool)
    for i in range(mu):
        gi = np.zeros((modulus,) * mu, dtype=np.int64)
        for j in range(mu):
            c = 2 * q_form[i][j] % modulus
            if c:
                gi = (gi + c * axes[j]) % modulus
        mask |= gi != 0
    return mask


def _smooth_points(q_form: Mat, b: int, p: int, limit: int) -> list[tuple[Vec, int]]:
    """Up to ``limit`` F_p points of {Q = b*w^2, w != 0} nonsingular on the
    projective quadric, enumerated with w ascending and x lexicographic."""
    mu = len(q_form)
    qgrid = _form_grid(q_form, p).ravel()
    grad_flat = None
    shape = (p,) * mu
    found: list[tuple[Vec, int]] = []
    for w in range(1, p):
        target = b * w * w % p
        hits = np.flatnonzero(qgrid == target)
        if hits.size == 0:
            continue
        if (2 * b * w) % p == 0:
            if grad_flat is None:
                grad_flat = _gradient_nonzero_grid(q_form, p).ravel()
            hits = hits[grad_flat[hits]]
            if hits.size == 0:
                continue
        for idx in hits[: max(1, limit - len(found))]:
            x = tuple(int(c) for c in np.unravel_index(int(idx), shape))
            found.append((x, w))
        if len(found) >= limit:
            break
    return found


def smooth_point_mod_p(prob: QuadricProblem) -> tuple[int, ...] | None:
    """An F_p point (x..., w) of V = {Q - b*w^2 = 0} with w != 0 that is
    nonsingular on V, or None if exhaustive enumeration finds none.

    For odd p not dividing b*det(Q) and mu >= 2 such a point always exists
    (the quadric is nonsingular with a rational point off w = 0).
    """
    p = prob.modulus
    if not is_prime(p):
        raise ValueError(f"modulus {p} is not prime")
    pts = _smooth_points(prob.q_form, prob.b, p, 1)
    if not pts:
        return None
    x, w = pts[0]
    return (*x, w)


def _partials(q_form: Mat, b: int, coords: Sequence[int]) -> list[int]:
    mu = len(q_form)
    x = coords[:mu]
    w = coords[mu]
    grads = [2 * sum(q_form[i][j] * x[j] for j in range(mu)) for i in range(mu)]
    grads.append(-2 * b * w)
    return grads


def _hensel_lift(q_form: Mat, b: int, p: int, e: int, base: tuple[Vec, int]) -> tuple[Vec, int]:
    """Lift a smooth mod-p point to mod p**e along the lowest-index
    coordinate with unit partial derivative."""
    mu = len(q_form)
    coords = [*base[0], base[1]]
    partials = _partials(q_form, b, coords)
    pivot = next(i for i, g in enumerate(partials) if g % p != 0)
    modulus = p
    for _ in range(e - 1):
        modulus *= p
        f = (eval_form(q_form, coords[:mu]) - b * coords[mu] ** 2) % modulus
        deriv = _partials(q_form, b, coords)[pivot] % modulus
        coords[pivot] = (coords[pivot] - f * pow(deriv, -1, modulus)) % modulus
    x, w = tuple(coords[:mu]), coords[mu]
    assert (eval_form(q_form, x) - b * w * w) % modulus == 0 and w % p != 0
    return x, w


def _enumerate_points(
    q_form: Mat, b: int, modulus: int, p: int, limit: int
) -> list[tuple[Vec, int]]:
    """Complete bounded enumeration of solutions mod ``modulus`` = p**e with
    w a unit.  Solutions whose x is nonzero mod p are listed first: they
    stay usable downstream when condition checks involve pairings with x."""
    mu = len(q_form)
    qgrid = _form_grid(q_form, modulus).ravel()
    shape = (modulus,) * mu
    raw: list[tuple[Vec, int]] = []
    for w in range(1, modulus):
        if w % p == 0:
            continue
        target = b * w * w % modulus
        hits = np.flatnonzero(qgrid == target)
        for idx in hits[: max(1, 2 * limit - len(raw))]:
            x = tuple(int(c) for c in np.unravel_index(int(idx), shape))
            raw.append((x, w))
        if len(raw) >= 2 * limit:
            break
    raw.sort(key=lambda pt: all(c % p == 0 for c in pt[0]))
    return raw[:limit]


def _prime_power_points(q_form: Mat, b: int, p: int, e: int, limit: int) -> list[tuple[Vec, int]]:
    sols: list[tuple[Vec, int]] = []
    if e >= 2:
        for base in _smooth_points(q_form, b, p, limit):
            sols.append(_hensel_lift(q_form, b, p, e, base))
    if not sols:
        sols = _enumerate_points(q_form, b, p**e, p, limit)
    return sols


def solve_candidates(
    q_form: Mat, b: int, ell: int, limit: int = 8
) -> list[QdSolution] | Unsolvable:
    """Solutions of Q(x) = b*w**2 (mod ell), gcd(w, ell) = 1, combining one
    solution per prime power by CRT; up to ``limit`` distinct candidates."""
    q_form = mat(q_form)
    if not is_symmetric(q_form):
        raise ValueError("q_form must be symmetric")
    if det(q_form) == 0:
        raise ValueError("q_form must be non-degenerate")
    if ell < 1:
        raise ValueError("ell must be positive")
    mu = len(q_form)
    if ell == 1:
        return [QdSolution((0,) * mu, 1)]
    factors = factorize(ell)
    per_prime: list[tuple[int, list[tuple[Vec, int]]]] = []
    for p in sorted(factors):
        e = factors[p]
        pts = _prime_power_points(q_form, b, p, e, limit)
        if not pts:
            return Unsolvable(prime=p, reason=f"no solution modulo {p}**{e} with unit w")
        per_prime.append((p**e, pts))
    moduli = [m for m, _ in per_prime]
    out: list[QdSolution] = []
    for combo in itertools.product(*(pts for _, pts in per_prime)):
        x = tuple(
            crt_list([pt[0][i] for pt in combo], moduli) for i in range(mu)
        )
        d = crt_list([pt[1] for pt in combo], moduli)
        sol = QdSolution(x, d)
        if not verify_solution(q_form, b, ell, sol):
            raise AssertionError("combined congruence solution failed re-verification")
        out.append(sol)
        if len(out) >= limit:
            break
    return out


def hensel_crt_solve(q_form: Mat, b: int, ell: int) -> QdSolution | Unsolvable:
    """First solution of Q(x) = b*w**2 (mod ell) with unit w, or Unsolvable."""
    result = solve_candidates(q_form, b, ell, limit=1)
    if isinstance(result, Unsolvable):
        return result
    return result[0]


def rank1_qr_obstruction(q_r: int, q_b: int, ell: int) -> bool:
    """True iff -q_r*q_b is a quadratic non-residue mod the odd prime ell.

    When true, Q(x) = -q_b*d**2 (mod ell) with Q = <q_r> and unit d has no
    solution, so the rank-one Picard case is numerically obstructed.
    """
    if ell <= 2 or not is_prime(ell):
        raise ValueError(f"ell must be an odd prime, got {ell}")
    if q_r % ell == 0:
        raise ValueError("ell must not divide q_r")
    return legendre(-q_r * q_b, ell) == -1


def find_coprime_pairing_class(
    q_form: Mat,
    d_coords: Sequence[int],
    q_b: int,
    ell: int,
    radius: int = 6,
) -> Vec | None:
    """A vector y with gcd(d . y, q_b, ell) = 1, or None within the budget.

    When gcd(q_b, ell) = 1 any vector qualifies and d itself is returned
    immediately; otherwise coordinate boxes of increasing radius are
    scanned lexicographically.
    """
    q_form = mat(q_form)
    if det(q_form) == 0:
        raise ValueError("q_form must be non-degenerate")
    d_coords = tuple(int(c) for c in d_coords)
    if math.gcd(q_b, ell) == 1:
        return d_coords
    mu = len(q_form)
    gd = [sum(q_form[i][j] * d_coords[j] for j in range(mu)) for i in range(mu)]
    for r in range(1, radius + 1):
        for cand in itertools.product(range(-r, r + 1), repeat=mu):
            if max(abs(c) for c in cand) != r:
                continue
            pair_val = sum(g * c for g, c in zip(gd, cand))
            if math.gcd(math.gcd(abs(pair_val), abs(q_b)), ell) == 1:
                return tuple(cand)
    return None


def cone_singularity_constant(q_form: Mat) -> int:
    """Product of the primes p where the affine cone {Q = 0} acquires a
    singular point away from the origin over the algebraic closure of F_p.

    For odd p that happens exactly when p divides det(Q); the prime 2 is
    always included (the even-characteristic criterion is delicate and
    over-inclusion is safe: the constant is only used as a modulus to
    avoid).
    """
    q_form = mat(q_form)
    d = det(q_form)
    if d == 0:
        raise ValueError("q_form must be non-degenerate")
    out = 2
    for p in prime_factors(abs(d)):
        if p != 2:
            out *= p
    return out
