"""
Exact root-datum arithmetic for the classical types B_n and C_n.

Coordinates are the standard basis e_1..e_n of the weight space; weights and
coweights share that basis and pair through the coordinate dot product. All
arithmetic is done in Fractions.
"""

import logging
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import permutations, product
from typing import FrozenSet, Iterable, List, Sequence, Tuple

import sympy

from src.errors import DomainError

logger = logging.getLogger(__name__)

FAMILIES = ("B", "C")
MAX_WEYL_RANK = 8


@dataclass(frozen=True)
class Weight:
    """An exact rational vector in the weight (or coweight) space."""

    coords: Tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(Fraction(c) for c in self.coords))

    @classmethod
    def of(cls, *values) -> "Weight":
        return cls(tuple(Fraction(v) for v in values))

    @classmethod
    def zero(cls, rank: int) -> "Weight":
        return cls((Fraction(0),) * rank)

    @classmethod
    def unit(cls, rank: int, i: int, scale=1) -> "Weight":
        coords = [Fraction(0)] * rank
        coords[i] = Fraction(scale)
        return cls(tuple(coords))

    @property
    def rank(self) -> int:
        return len(self.coords)

    def _check(self, other: "Weight") -> None:
        if self.rank != other.rank:
            raise DomainError(f"dimension mismatch: {self.rank} vs {other.rank}")

    def __add__(self, other: "Weight") -> "Weight":
        self._check(other)
        return Weight(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "Weight") -> "Weight":
        self._check(other)
        return Weight(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "Weight":
        return Weight(tuple(-a for a in self.coords))

    def __mul__(self, scalar) -> "Weight":
        s = Fraction(scalar)
        return Weight(tuple(s * a for a in self.coords))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def __str__(self) -> str:
        return "(" + ",".join(str(c) for c in self.coords) + ")"


Coweight = Weight


def parse_weight(text: str) -> Weight:
    """
    Parse a comma separated list of rationals, e.g. "1/2,0".

    Args:
        text: Coordinates separated by commas, optionally wrapped in parentheses

    Returns:
        Exact Weight
    """
    body = text.strip().strip("()")
    if not body:
        raise DomainError("empty weight")
    try:
        return Weight(tuple(Fraction(part.strip()) for part in body.split(",")))
    except (ValueError, ZeroDivisionError):
        raise DomainError(f"cannot parse weight {text!r}")


def pairing(w: Weight, cw: Coweight) -> Fraction:
    """Natural pairing <w, cw>."""
    w._check(cw)
    return sum((a * b for a, b in zip(w.coords, cw.coords)), Fraction(0))


def coroot_of(root: Weight) -> Weight:
    """alpha^vee = 2 alpha / (alpha, alpha) in the standard inner product."""
    norm = pairing(root, root)
    if norm == 0:
        raise DomainError("zero vector is not a root")
    return root * (Fraction(2) / norm)


def _to_fraction(x) -> Fraction:
    x = sympy.Rational(x)
    return Fraction(int(x.p), int(x.q))


def _to_sympy(rows) -> sympy.Matrix:
    return sympy.Matrix(
        [[sympy.Rational(c.numerator, c.denominator) for c in row] for row in rows]
    )


def _positive_roots(family: str, n: int) -> Tuple[Weight, ...]:
    e = [Weight.unit(n, i) for i in range(n)]
    roots = []
    for i in range(n):
        for j in range(i + 1, n):
            roots.append(e[i] - e[j])
            roots.append(e[i] + e[j])
    scale = 1 if family == "B" else 2
    roots.extend(e[i] * scale for i in range(n))
    return tuple(roots)


@dataclass(frozen=True)
class RootDatum:
    """Simple roots, coroots and derived data of a classical root system."""

    family: str
    rank: int
    simple_roots: Tuple[Weight, ...]
    simple_coroots: Tuple[Weight, ...]
    cartan: Tuple[Tuple[int, ...], ...]
    cartan_bar: Tuple[Tuple[Fraction, ...], ...]
    fundamental_coweights: Tuple[Weight, ...]
    weyl_vector: Weight

    @cached_property
    def positive_roots(self) -> Tuple[Weight, ...]:
        return _positive_roots(self.family, self.rank)

    @cached_property
    def roots(self) -> Tuple[Weight, ...]:
        return self.positive_roots + tuple(-a for a in self.positive_roots)

    @cached_property
    def fundamental_weights(self) -> Tuple[Weight, ...]:
        # dual basis to the simple coroots: rows of (A^T)^-1, A = coroots as rows
        A = _to_sympy(cw.coords for cw in self.simple_coroots)
        inv = A.T.inv()
        return tuple(
            Weight(tuple(_to_fraction(inv[i, j]) for j in range(self.rank)))
            for i in range(self.rank)
        )

    @property
    def dimension(self) -> int:
        return self.rank + len(self.roots)

    def __str__(self) -> str:
        return f"{self.family}{self.rank}"


def build_root_datum(family: str, rank: int) -> RootDatum:
    """
    Build the root datum of type B_n or C_n in standard coordinates.

    B_n has simple roots e_i - e_{i+1} and e_n (coroot 2e_n); C_n has
    e_i - e_{i+1} and 2e_n (coroot e_n).

    Args:
        family: "B" or "C"
        rank: Positive rank n

    Returns:
        RootDatum with Cartan matrix, its inverse transpose, fundamental
        coweights and Weyl vector filled in
    """
    family = family.upper()
    if family not in FAMILIES:
        raise DomainError(f"unsupported family {family!r}; expected one of {FAMILIES}")
    if rank < 1:
        raise DomainError(f"rank must be positive, got {rank}")

    n = rank
    roots = [Weight.unit(n, i) - Weight.unit(n, i + 1) for i in range(n - 1)]
    roots.append(Weight.unit(n, n - 1, 1 if family == "B" else 2))
    coroots = [coroot_of(a) for a in roots]

    cartan = tuple(
        tuple(int(pairing(roots[i], coroots[j])) for j in range(n)) for i in range(n)
    )
    bar = sympy.Matrix(cartan).T.inv()
    cartan_bar = tuple(tuple(_to_fraction(bar[i, j]) for j in range(n)) for i in range(n))

    coweights = []
    for i in range(n):
        acc = Weight.zero(n)
        for j in range(n):
            acc = acc + coroots[j] * cartan_bar[i][j]
        coweights.append(acc)

    half_sum = Weight.zero(n)
    for a in _positive_roots(family, n):
        half_sum = half_sum + a

    return RootDatum(
        family=family,
        rank=n,
        simple_roots=tuple(roots),
        simple_coroots=tuple(coroots),
        cartan=cartan,
        cartan_bar=cartan_bar,
        fundamental_coweights=tuple(coweights),
        weyl_vector=half_sum * Fraction(1, 2),
    )


def dominance_leq(nu: Weight, mu: Weight, rd: RootDatum) -> bool:
    """nu <= mu iff <nu - mu, w> <= 0 for every fundamental coweight w."""
    diff = nu - mu
    return all(pairing(diff, cw) <= 0 for cw in rd.fundamental_coweights)


def is_dominant(nu: Weight, rd: RootDatum) -> bool:
    return all(pairing(nu, ac) >= 0 for ac in rd.simple_coroots)


@dataclass(frozen=True)
class WeylElement:
    """
    Signed permutation: coordinate i is sent to position perm[i] and
    multiplied by signs[i].
    """

    perm: Tuple[int, ...]
    signs: Tuple[int, ...]

    @classmethod
    def identity(cls, rank: int) -> "WeylElement":
        return cls(tuple(range(rank)), (1,) * rank)

    def act(self, nu: Weight) -> Weight:
        out = [Fraction(0)] * len(self.perm)
        for i, c in enumerate(nu.coords):
            out[self.perm[i]] = self.signs[i] * c
        return Weight(tuple(out))

    def __mul__(self, other: "WeylElement") -> "WeylElement":
        # (self * other).act(v) == self.act(other.act(v))
        perm = tuple(self.perm[other.perm[i]] for i in range(len(self.perm)))
        signs = tuple(
            other.signs[i] * self.signs[other.perm[i]] for i in range(len(self.perm))
        )
        return WeylElement(perm, signs)

    def inverse(self) -> "WeylElement":
        n = len(self.perm)
        perm = [0] * n
        signs = [1] * n
        for i in range(n):
            perm[self.perm[i]] = i
            signs[self.perm[i]] = self.signs[i]
        return WeylElement(tuple(perm), tuple(signs))

    def is_identity(self) -> bool:
        return self.perm == tuple(range(len(self.perm))) and all(s == 1 for s in self.signs)


def reflection(root: Weight) -> WeylElement:
    """
    The reflection s_alpha(v) = v - <v, alpha^vee> alpha as a signed permutation.

    Args:
        root: A root of type B or C (forms +-e_i, +-2e_i, +-e_i +- e_j)

    Returns:
        WeylElement realising s_alpha
    """
    n = root.rank
    check = coroot_of(root)
    perm = [0] * n
    signs = [1] * n
    for k in range(n):
        e_k = Weight.unit(n, k)
        image = e_k - root * pairing(e_k, check)
        nonzero = [(i, c) for i, c in enumerate(image.coords) if c != 0]
        if len(nonzero) != 1 or abs(nonzero[0][1]) != 1:
            raise DomainError(f"{root} is not a root of a signed-permutation Weyl group")
        perm[k], signs[k] = nonzero[0][0], int(nonzero[0][1])
    return WeylElement(tuple(perm), tuple(signs))


def simple_reflections(rd: RootDatum) -> List[WeylElement]:
    return [reflection(a) for a in rd.simple_roots]


def generate_subgroup(generators: Iterable[WeylElement], rank: int) -> FrozenSet[WeylElement]:
    """
    Closure of a set of Weyl elements under composition (BFS from identity).

    Args:
        generators: Generating elements; may be empty
        rank: Rank of the ambient group, used for the identity

    Returns:
        Frozen set of all products of generators
    """
    gens = list(generators)
    start = WeylElement.identity(rank)
    seen = {start}
    queue = deque([start])
    while queue:
        g = queue.popleft()
        for s in gens:
            h = g * s
            if h not in seen:
                seen.add(h)
                queue.append(h)
    return frozenset(seen)


def weyl_elements(rd: RootDatum) -> List[WeylElement]:
    """
    Enumerate the Weyl group of B_n / C_n as all signed permutations.

    Args:
        rd: Root datum

    Returns:
        List of 2^n * n! elements in a deterministic order
    """
    if rd.rank > MAX_WEYL_RANK:
        raise DomainError(
            f"rank {rd.rank} too large for Weyl group enumeration (max {MAX_WEYL_RANK})"
        )
    n = rd.rank
    elements = [
        WeylElement(perm, signs)
        for perm in permutations(range(n))
        for signs in product((1, -1), repeat=n)
    ]
    logger.debug("enumerated %d Weyl elements for %s", len(elements), rd)
    return elements


def longest_element(rd: RootDatum) -> WeylElement:
    return WeylElement(tuple(range(rd.rank)), (-1,) * rd.rank)


def weyl_orbit(nu: Weight, elements: Sequence[WeylElement]) -> List[Weight]:
    """Distinct images of nu, in first-seen order."""
    seen = {}
    for w in elements:
        seen.setdefault(w.act(nu), None)
    return list(seen)


def dominant_representative(nu: Weight, rd: RootDatum) -> Weight:
    """
    Dominant element of the Weyl orbit of nu.

    For B/C the dominant chamber is x_1 >= ... >= x_n >= 0, so the
    representative is the vector of absolute values sorted descending.
    """
    if nu.rank != rd.rank:
        raise DomainError(f"dimension mismatch: {nu.rank} vs {rd.rank}")
    return Weight(tuple(sorted((abs(c) for c in nu.coords), reverse=True)))


def root_in_span(root: Weight, subset: Sequence[int], rd: RootDatum) -> bool:
    """Whether root is an integer combination of the simple roots indexed by subset."""
    basis = _to_sympy(a.coords for a in rd.simple_roots).T
    coeffs = basis.inv() * _to_sympy([c] for c in root.coords)
    return all(coeffs[i] == 0 for i in range(rd.rank) if i not in subset)


def levi_dimension(rd: RootDatum, subset: Sequence[int]) -> int:
    """
    Dimension of the standard Levi subgroup spanned by a set of simple roots.

    Args:
        rd: Root datum of the ambient group
        subset: Indices of the simple roots in the Levi

    Returns:
        rank + number of roots in the span of the subset
    """
    return rd.rank + sum(1 for a in rd.roots if root_in_span(a, subset, rd))


if __name__ == "__main__":
    b2 = build_root_datum("B", 2)
    print(f"Cartan: {b2.cartan}")
    print(f"Cartan bar: {[[str(x) for x in row] for row in b2.cartan_bar]}")
    print(f"rho: {b2.weyl_vector}")
    print(f"|W|: {len(weyl_elements(b2))}")
