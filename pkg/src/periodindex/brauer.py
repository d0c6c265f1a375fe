"""B-field presentations of Brauer classes relative to a Picard sublattice.

A scenario fixes the ambient K3[n] lattice, a primitively embedded Picard
sublattice, a transcendental class the B-field is built from, and the
denominator ell.  The quotient H2/Pic is free because the Picard sublattice
is saturated; images in it are read off through a fixed unimodular change
of coordinates obtained from the Smith normal form of the basis matrix.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from collections.abc import Sequence

from .arith import content, factorize
from .errors import ScenarioValidationError
from .intlinalg import (
    Mat,
    Vec,
    det,
    elementary_divisors,
    mat,
    mat_vec,
    right_kernel_basis,
    smith_normal_form,
    transpose,
)
from .lattices import IntegerLattice, build_k3n_lattice, is_primitive, norm, pairing


@dataclass(frozen=True)
class PicardEmbedding:
    """A primitive sublattice of the ambient lattice, with derived data.

    ``pic_gram`` is the restricted form; ``transcendental_basis`` spans the
    orthogonal complement; ``quotient_transform`` is unimodular and sends a
    vector x to coordinates in which the Picard sublattice occupies the
    first mu slots, so the class of x in ambient/Pic is the tail of the
    transformed vector.
    """

    ambient: IntegerLattice
    pic_basis: tuple[Vec, ...]
    pic_gram: Mat = field(compare=False)
    transcendental_basis: tuple[Vec, ...] = field(compare=False)
    quotient_transform: Mat = field(compare=False)

    @property
    def mu(self) -> int:
        return len(self.pic_basis)

    @classmethod
    def build(cls, ambient: IntegerLattice, pic_basis: Sequence[Sequence[int]]) -> "PicardEmbedding":
        rank = ambient.rank
        basis = tuple(tuple(int(x) for x in v) for v in pic_basis)
        mu = len(basis)
        if not 1 <= mu < rank:
            raise ScenarioValidationError(
                "picard rank out of range", f"got {mu} vectors for ambient rank {rank}"
            )
        for v in basis:
            if len(v) != rank:
                raise ScenarioValidationError(
                    "picard vector length", f"expected {rank} coordinates, got {len(v)}"
                )
        a = mat(basis)
        divisors = elementary_divisors(a)
        if len(divisors) != mu:
            raise ScenarioValidationError("picard basis not linearly independent")
        if any(d != 1 for d in divisors):
            raise ScenarioValidationError(
                "picard sublattice not primitive", f"elementary divisors {divisors}"
            )
        _, _, v = smith_normal_form(a)
        quotient_transform = transpose(v)

        pic_gram = mat([[pairing(ambient, p, q) for q in basis] for p in basis])
        if det(pic_gram) == 0:
            raise ScenarioValidationError("picard form degenerate")
        pairing_rows = mat([mat_vec(ambient.gram, p) for p in basis])
        transcendental = right_kernel_basis(pairing_rows)
        return cls(
            ambient=ambient,
            pic_basis=basis,
            pic_gram=pic_gram,
            transcendental_basis=transcendental,
            quotient_transform=quotient_transform,
        )

    def quotient_coords(self, v: Sequence[int]) -> Vec:
        """Coordinates of the class of v in the free quotient ambient/Pic."""
        return mat_vec(self.quotient_transform, v)[self.mu :]


@lru_cache(maxsize=None)
def _quotient_index(emb: PicardEmbedding) -> int:
    cols = [emb.quotient_coords(t) for t in emb.transcendental_basis]
    composite = transpose(mat(cols))
    divisors = elementary_divisors(composite)
    if len(divisors) != len(cols):
        raise ValueError("transcendental image degenerate; embedding invalid")
    out = 1
    for d in divisors:
        out *= d
    return out


def transcendental_quotient_index(emb: PicardEmbedding) -> int:
    """Index of the image of the transcendental lattice inside ambient/Pic.

    Product of the elementary divisors of the composite map; finite because
    both the ambient form and the restricted Picard form are non-degenerate.
    """
    return _quotient_index(emb)


@dataclass(frozen=True)
class BrauerScenario:
    """A B-field b_class/ell relative to a Picard embedding of the K3[n]
    lattice, with an optional designated primitive polarization."""

    n: int
    embedding: PicardEmbedding
    b_class: Vec
    ell: int
    polarization: Vec | None = None

    def __post_init__(self):
        object.__setattr__(self, "b_class", tuple(int(x) for x in self.b_class))
        if self.polarization is not None:
            object.__setattr__(self, "polarization", tuple(int(x) for x in self.polarization))
        if self.n < 2:
            raise ScenarioValidationError("n out of range", f"n must be >= 2, got {self.n}")
        lat = self.embedding.ambient
        if lat.gram != build_k3n_lattice(self.n).gram:
            raise ScenarioValidationError("ambient lattice mismatch", f"not the K3[{self.n}] lattice")
        if len(self.b_class) != lat.rank:
            raise ScenarioValidationError(
                "b_class length", f"expected {lat.rank} coordinates, got {len(self.b_class)}"
            )
        if self.ell < 1:
            raise ScenarioValidationError("ell out of range", f"ell must be >= 1, got {self.ell}")
        for p in self.embedding.pic_basis:
            if pairing(lat, self.b_class, p) != 0:
                raise ScenarioValidationError("B not transcendental")
        if self.ell > 1:
            c = content(self.b_class)
            for p in factorize(self.ell):
                if c % p == 0:
                    raise ScenarioValidationError(
                        "B divisible by a prime factor of ell", f"prime {p}"
                    )
        if self.polarization is not None:
            pol = self.polarization
            if len(pol) != lat.rank:
                raise ScenarioValidationError("polarization length")
            for t in self.embedding.transcendental_basis:
                if pairing(lat, pol, t) != 0:
                    raise ScenarioValidationError("polarization not algebraic")
            if not any(pol) or not is_primitive(lat, pol):
                raise ScenarioValidationError("polarization not primitive")
            if norm(lat, pol) <= 0:
                raise ScenarioValidationError("polarization not positive")

    @property
    def lattice(self) -> IntegerLattice:
        return self.embedding.ambient

    def b_norm(self) -> int:
        return norm(self.lattice, self.b_class)

    def polarization_degree(self) -> int | None:
        """Half the square of the designated polarization, when present."""
        if self.polarization is None:
            return None
        return norm(self.lattice, self.polarization) // 2


def period_of(s: BrauerScenario) -> int:
    """Order of the image of b_class/ell in (ambient/Pic) tensor Q/Z.

    Always divides ell; equals ell whenever gcd(ell, index) = 1.
    """
    image = s.embedding.quotient_coords(s.b_class)
    return s.ell // math.gcd(s.ell, content(image))


def is_nonspecial(s: BrauerScenario) -> bool:
    """gcd of the B-field square with ell is 1."""
    return math.gcd(s.b_norm(), s.ell) == 1
