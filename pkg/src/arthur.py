"""
Nilpotent orbits, weighted Dynkin diagrams, Arthur SL2-types of A-shapes and
the rate-of-decay invariant r(nu).
"""

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import total_ordering
from typing import Dict, List, NamedTuple, Optional, Tuple, Union

from sympy.utilities.iterables import partitions

from src.errors import DomainError
from src.lie_core import (
    RootDatum,
    Weight,
    build_root_datum,
    dominance_leq,
    pairing,
)

logger = logging.getLogger(__name__)

Number = Union[Fraction, float]


@total_ordering
@dataclass(frozen=True)
class RateValue:
    """
    A rate of decay: a number r >= 2, or infinity (value None).
    Infinity compares above every finite value.
    """

    value: Optional[Number]

    def __post_init__(self):
        if self.value is not None and self.value < 2:
            raise DomainError(f"finite rates are >= 2, got {self.value}")

    @classmethod
    def infinity(cls) -> "RateValue":
        return cls(None)

    @classmethod
    def finite(cls, value) -> "RateValue":
        if isinstance(value, int):
            value = Fraction(value)
        return cls(value)

    @property
    def is_infinite(self) -> bool:
        return self.value is None

    def __eq__(self, other) -> bool:
        if not isinstance(other, RateValue):
            other = RateValue.finite(other) if other is not None else RateValue.infinity()
        return self.value == other.value

    def __lt__(self, other) -> bool:
        if not isinstance(other, RateValue):
            other = RateValue.finite(other)
        if self.is_infinite:
            return False
        if other.is_infinite:
            return True
        return self.value < other.value

    def __hash__(self) -> int:
        return hash(self.value)

    def __str__(self) -> str:
        return "inf" if self.is_infinite else str(self.value)


INFINITY = RateValue.infinity()


@dataclass(frozen=True)
class NilpotentOrbit:
    """
    A nilpotent orbit of a classical dual group, given by its partition.

    family "C" (symplectic, N even): odd parts occur with even multiplicity.
    family "B" (odd orthogonal, N odd): even parts occur with even multiplicity.
    """

    partition: Tuple[int, ...]
    family: str

    def __post_init__(self):
        parts = tuple(sorted((int(m) for m in self.partition), reverse=True))
        object.__setattr__(self, "partition", parts)
        object.__setattr__(self, "family", self.family.upper())
        if not parts or any(m <= 0 for m in parts):
            raise DomainError(f"partition must have positive parts: {self.partition}")
        if self.family not in ("B", "C"):
            raise DomainError(f"unsupported orbit family {self.family!r}")
        N = sum(parts)
        if self.family == "C" and N % 2:
            raise DomainError(f"symplectic partitions have even size, got {N}")
        if self.family == "B" and N % 2 == 0:
            raise DomainError(f"odd orthogonal partitions have odd size, got {N}")
        if not _parity_ok(parts, self.family):
            raise DomainError(f"partition {parts} violates the {self.family}-type parity rule")

    @property
    def N(self) -> int:
        return sum(self.partition)

    @property
    def rank(self) -> int:
        return self.N // 2

    def __str__(self) -> str:
        return "(" + ",".join(str(m) for m in self.partition) + ")"


def _parity_ok(parts: Tuple[int, ...], family: str) -> bool:
    bad_parity = 1 if family == "C" else 0
    for m in set(parts):
        if m % 2 == bad_parity and parts.count(m) % 2:
            return False
    return True


def nilpotent_partitions(family: str, N: int) -> List[NilpotentOrbit]:
    """
    All nilpotent orbits of Sp_N ("C") or SO_N with N odd ("B").

    Args:
        family: "B" or "C"
        N: Size of the partition

    Returns:
        Orbits in reverse lexicographic order, which refines the dominance order
    """
    family = family.upper()
    if N < 1:
        raise DomainError(f"N must be positive, got {N}")
    if family == "C" and N % 2:
        raise DomainError(f"Sp_N needs even N, got {N}")
    if family == "B" and N % 2 == 0:
        raise DomainError(f"type B needs odd N, got {N}")
    if family not in ("B", "C"):
        raise DomainError(f"unsupported family {family!r}")

    found = []
    for mult in partitions(N):
        parts = tuple(sorted((m for m, k in mult.items() for _ in range(k)), reverse=True))
        if _parity_ok(parts, family):
            found.append(parts)
    found.sort(reverse=True)
    return [NilpotentOrbit(p, family) for p in found]


def _dynkin_h(orbit: NilpotentOrbit) -> Weight:
    exponents = []
    for m in orbit.partition:
        exponents.extend(range(m - 1, -m, -2))
    exponents.sort(reverse=True)
    return Weight(tuple(Fraction(x) for x in exponents[: orbit.rank]))


def weighted_dynkin(orbit: NilpotentOrbit) -> Tuple[int, ...]:
    """
    Weighted Dynkin diagram (<alpha_i, h>)_i of an orbit in its own group.

    Args:
        orbit: Nilpotent orbit of the dual group

    Returns:
        Integer labels, one per simple root
    """
    h = _dynkin_h(orbit)
    rd = build_root_datum(orbit.family, orbit.rank)
    return tuple(int(pairing(a, h)) for a in rd.simple_roots)


def dual_family(family: str) -> str:
    return {"B": "C", "C": "B"}[family.upper()]


def nu_sigma(orbit: NilpotentOrbit, rd: RootDatum) -> Weight:
    """
    Weight nu with <nu, alpha_i^vee> = (weighted Dynkin label)_i / 2.

    Args:
        orbit: Orbit of the dual group
        rd: Group-side root datum (family dual to the orbit's)

    Returns:
        Exact solution of the coroot system
    """
    if rd.family != dual_family(orbit.family) or rd.rank != orbit.rank:
        raise DomainError(
            f"orbit of type {orbit.family}{orbit.rank} needs the dual datum "
            f"{dual_family(orbit.family)}{orbit.rank}, got {rd}"
        )
    labels = weighted_dynkin(orbit)
    nu = Weight.zero(rd.rank)
    for label, omega in zip(labels, rd.fundamental_weights):
        nu = nu + omega * Fraction(label, 2)
    return nu


def check_dominance_interval(nu: Weight, rd: RootDatum) -> None:
    if nu.rank != rd.rank:
        raise DomainError(f"dimension mismatch: {nu.rank} vs {rd.rank}")
    if not (dominance_leq(Weight.zero(rd.rank), nu, rd) and dominance_leq(nu, rd.weyl_vector, rd)):
        raise DomainError(f"{nu} lies outside the dominance interval [0, rho] of {rd}")


def rate_invariant(nu: Weight, rd: RootDatum) -> RateValue:
    """
    Closed form r(nu) = 2 max_i (1 - (Cbar w_nu)_i / (Cbar 1)_i)^-1.

    Args:
        nu: Weight with 0 <= nu <= rho
        rd: Root datum

    Returns:
        Exact rate, infinite when some ratio equals 1
    """
    check_dominance_interval(nu, rd)
    n = rd.rank
    w_nu = [pairing(nu, ac) for ac in rd.simple_coroots]
    worst = Fraction(0)
    for i in range(n):
        num = sum((rd.cartan_bar[i][j] * w_nu[j] for j in range(n)), Fraction(0))
        den = sum(rd.cartan_bar[i], Fraction(0))
        ratio = num / den
        if ratio == 1:
            return INFINITY
        worst = max(worst, 1 / (1 - ratio))
    return RateValue.finite(2 * worst)


def rate_oracle(nu: Weight, rd: RootDatum) -> RateValue:
    """
    inf { r >= 2 : nu <= (1 - 2/r) rho }, solved one coweight constraint at a time.
    """
    check_dominance_interval(nu, rd)
    rho = rd.weyl_vector
    threshold = Fraction(2)
    for cw in rd.fundamental_coweights:
        top = pairing(rho, cw)
        gap = top - pairing(nu, cw)
        if gap == 0:
            return INFINITY
        threshold = max(threshold, 2 * top / gap)
    if not dominance_leq(nu, rho * (1 - 2 / threshold), rd):
        raise RuntimeError(f"oracle threshold {threshold} does not satisfy the dominance test")
    return RateValue.finite(threshold)


@dataclass(frozen=True)
class AShape:
    """An A-shape: pairs (n_i, m_i) of block size and SL2 dimension."""

    name: str
    pairs: Tuple[Tuple[int, int], ...]
    N: int = 4

    def __post_init__(self):
        pairs = tuple((int(a), int(b)) for a, b in self.pairs)
        if not pairs or any(a < 1 or b < 1 for a, b in pairs):
            raise DomainError(f"shape {self.name} needs positive pairs, got {self.pairs}")
        object.__setattr__(self, "pairs", pairs)

    def __str__(self) -> str:
        return "(" + ",".join(f"({a},{b})" for a, b in self.pairs) + ")"


SO5_SHAPES = (
    AShape("G", ((4, 1),)),
    AShape("Y", ((2, 1), (2, 1))),
    AShape("F", ((1, 4),)),
    AShape("B", ((1, 2), (1, 2))),
    AShape("Q", ((2, 2),)),
    AShape("P", ((2, 1), (1, 2))),
)


def arthur_partition_of_shape(shape: AShape) -> NilpotentOrbit:
    """
    Partition of the Arthur SL2-type: each m_i repeated n_i times.

    Args:
        shape: A-shape whose sizes sum to shape.N

    Returns:
        Orbit of Sp_N (N even) or SO_N (N odd)
    """
    total = sum(a * b for a, b in shape.pairs)
    if total != shape.N:
        raise DomainError(f"shape {shape.name} sums to {total}, expected {shape.N}")
    parts = []
    for n_i, m_i in shape.pairs:
        parts.extend([m_i] * n_i)
    return NilpotentOrbit(tuple(parts), "C" if shape.N % 2 == 0 else "B")


class ShapeRow(NamedTuple):
    shape: AShape
    orbit: NilpotentOrbit
    rate: RateValue


def shape_catalog_SO5() -> List[ShapeRow]:
    """The six SO5 A-shapes with their SL2-type and worst unramified rate."""
    b2 = build_root_datum("B", 2)
    rows = []
    for shape in SO5_SHAPES:
        orbit = arthur_partition_of_shape(shape)
        rows.append(ShapeRow(shape, orbit, rate_invariant(nu_sigma(orbit, b2), b2)))
    return rows


class LeviLabel(str, Enum):
    """Standard Levi subgroups of Sp4(C), the dual group of SO5."""

    T = "T"
    M = "M"
    S = "S"
    G = "G"

    @property
    def description(self) -> str:
        return {
            "T": "Borel (maximal torus)",
            "M": "Klingen (Sp2 x GL1)",
            "S": "Siegel (GL2)",
            "G": "full group",
        }[self.value]


_C2_PRINCIPAL_LEVI = {
    (4,): LeviLabel.G,
    (2, 2): LeviLabel.S,
    (2, 1, 1): LeviLabel.M,
    (1, 1, 1, 1): LeviLabel.T,
}


def principal_levi_of(orbit: NilpotentOrbit) -> LeviLabel:
    """Levi of Sp4(C) in which the orbit is principal."""
    if orbit.family != "C" or orbit.N != 4:
        raise DomainError(f"principal Levi table covers Sp4 orbits only, got {orbit.family}{orbit.N}")
    return _C2_PRINCIPAL_LEVI[orbit.partition]


# rho_L of every real Levi whose dual is the given Levi of Sp4(C)
_RHO_L = {
    "split": {
        LeviLabel.T: [(0, 0)],
        LeviLabel.M: [(Fraction(1, 2), 0), (0, 0)],
        LeviLabel.S: [(Fraction(1, 2), Fraction(1, 2))],
        LeviLabel.G: [(Fraction(3, 2), Fraction(1, 2))],
    },
    "hyperbolic": {
        LeviLabel.T: [(0, 0)],
        LeviLabel.M: [(Fraction(1, 2), 0)],
        LeviLabel.S: [(0, 0)],
        LeviLabel.G: [(Fraction(3, 2), Fraction(1, 2))],
    },
}


def archimedean_rate(form: str, levi: Union[LeviLabel, str]) -> RateValue:
    """
    Worst rate in a cohomological packet of SO(3,2) or SO(1,4).

    Args:
        form: "split" or "hyperbolic"
        levi: Levi of Sp4(C) for which the SL2-type is principal

    Returns:
        max over the admissible real Levis L of r(rho_L)
    """
    if form not in _RHO_L:
        raise DomainError(f"archimedean rates are defined for split/hyperbolic forms, got {form!r}")
    levi = LeviLabel(levi)
    b2 = build_root_datum("B", 2)
    return max(rate_invariant(Weight.of(*rho), b2) for rho in _RHO_L[form][levi])


def shape_rate_SO5(name: str) -> RateValue:
    """Worst rate of a shape over unramified and real places."""
    rows = {row.shape.name: row for row in shape_catalog_SO5()}
    if name not in rows:
        raise DomainError(f"unknown SO5 shape {name!r}")
    row = rows[name]
    levi = principal_levi_of(row.orbit)
    local = [row.rate] + [archimedean_rate(form, levi) for form in _RHO_L]
    return max(local)


def _dim_odd_orthogonal(n: int) -> int:
    return build_root_datum("B", n).dimension if n > 0 else 0


def gsk_deficiencies(k: int, n: int) -> Tuple[int, int]:
    """
    Deficiency delta and GSK-deficiency delta_2 of sigma = nu(2k) + nu(1)^(2n-2k)
    for G = SO_{2n+1}.

    Args:
        k: Size parameter, 1 <= k < n
        n: Rank of G

    Returns:
        (delta, delta_2), with delta_2 == (2n+1)(n-k)
    """
    if not 1 <= k < n:
        raise DomainError(f"need 1 <= k < n, got k={k}, n={n}")
    full = _dim_odd_orthogonal(n)
    first = _dim_odd_orthogonal(k)
    second = _dim_odd_orthogonal(n - k)
    twice_delta = full - first - second
    if twice_delta % 2:
        raise RuntimeError(f"odd deficiency numerator {twice_delta}")
    delta = twice_delta // 2
    delta_2 = delta + second
    if delta_2 != (2 * n + 1) * (n - k):
        raise RuntimeError(f"delta_2={delta_2} disagrees with (2n+1)(n-k)")
    return delta, delta_2


def orbit_summary(orbit: NilpotentOrbit) -> Dict[str, object]:
    """Row used by the `orbits` subcommand."""
    rd = build_root_datum(dual_family(orbit.family), orbit.rank)
    nu = nu_sigma(orbit, rd)
    row = {
        "family": orbit.family,
        "partition": str(orbit),
        "weighted_dynkin": ",".join(str(x) for x in weighted_dynkin(orbit)),
        "nu_sigma": str(nu),
        "rate": str(rate_invariant(nu, rd)),
        "principal_levi": "",
    }
    if orbit.family == "C" and orbit.N == 4:
        row["principal_levi"] = principal_levi_of(orbit).value
    return row


if __name__ == "__main__":
    for row in shape_catalog_SO5():
        print(f"{row.shape.name}: {row.shape} -> {row.orbit}  r = {row.rate}")
    print(f"GSK (k=1, n=2): {gsk_deficiencies(1, 2)}")
