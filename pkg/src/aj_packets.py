"""
Cohomological A-packet combinatorics for the real forms of SO5: split
SO(3,2), hyperbolic SO(1,4) and compact SO(5).

Packet members are modelled only by their theta-stable parabolic direction
lambda and the set of (g,K)-cohomology degrees.
"""

import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Set, Tuple, Union

from pydantic import BaseModel, model_validator

from src.arthur import LeviLabel, archimedean_rate
from src.errors import DomainError
from src.lie_core import (
    Weight,
    WeylElement,
    build_root_datum,
    generate_subgroup,
    pairing,
    reflection,
    weyl_elements,
)

logger = logging.getLogger(__name__)

B2 = build_root_datum("B", 2)
FORM_LABELS = ("split", "hyperbolic", "compact")

E1 = Weight.of(1, 0)
E2 = Weight.of(0, 1)


@dataclass(frozen=True)
class RealForm:
    """A real form of SO5 described by its compact roots."""

    label: str
    compact_roots: FrozenSet[Weight]
    rank_K: int
    dim_p: int

    @property
    def noncompact_roots(self) -> Tuple[Weight, ...]:
        return tuple(a for a in B2.roots if a not in self.compact_roots)


def _signed(*roots: Weight) -> FrozenSet[Weight]:
    return frozenset(list(roots) + [-a for a in roots])


_COMPACT_ROOTS = {
    "split": _signed(E1),
    "hyperbolic": _signed(E1 - E2, E1 + E2),
    "compact": frozenset(B2.roots),
}


def real_form(label: str) -> RealForm:
    """
    Look up one of the three real forms of SO5.

    Args:
        label: "split", "hyperbolic" or "compact"

    Returns:
        RealForm; dim p is the number of noncompact roots
    """
    if label not in _COMPACT_ROOTS:
        raise DomainError(f"unknown real form {label!r}; expected one of {FORM_LABELS}")
    compact = _COMPACT_ROOTS[label]
    return RealForm(
        label=label,
        compact_roots=compact,
        rank_K=2,
        dim_p=len(B2.roots) - len(compact),
    )


def _as_form(form: Union[RealForm, str]) -> RealForm:
    return form if isinstance(form, RealForm) else real_form(form)


def weyl_K(form: Union[RealForm, str]) -> FrozenSet[WeylElement]:
    """Subgroup of W generated by reflections in the compact roots."""
    form = _as_form(form)
    return generate_subgroup((reflection(a) for a in sorted_roots(form.compact_roots)), 2)


def sorted_roots(roots) -> List[Weight]:
    return sorted(roots, key=lambda a: a.coords, reverse=True)


_LEVI_GENERATORS = {
    LeviLabel.T: (),
    LeviLabel.M: (E2,),
    LeviLabel.S: (E1 - E2,),
    LeviLabel.G: tuple(B2.simple_roots),
}

_LEVI_DIRECTION = {
    LeviLabel.T: Weight.of(2, 1),
    LeviLabel.M: E1,
    LeviLabel.S: E1 + E2,
    LeviLabel.G: Weight.zero(2),
}


def weyl_levi(levi: Union[LeviLabel, str]) -> FrozenSet[WeylElement]:
    """W(L-hat) under the identification W(G,T^c) = W(G-hat,T-hat)."""
    levi = LeviLabel(levi)
    return generate_subgroup((reflection(a) for a in _LEVI_GENERATORS[levi]), 2)


def packet_size(form: Union[RealForm, str], levi: Union[LeviLabel, str]) -> int:
    """
    Number of double cosets W_K \\ W / W(L-hat).

    Args:
        form: Real form
        levi: Levi label

    Returns:
        Count obtained by partitioning the eight elements of W
    """
    left = weyl_K(form)
    right = weyl_levi(levi)
    remaining = set(weyl_elements(B2))
    cosets = 0
    while remaining:
        w = min(remaining, key=lambda x: (x.perm, x.signs))
        block = {k * w * l for k in left for l in right}
        remaining -= block
        cosets += 1
    return cosets


def theta_parabolic_reps(form: Union[RealForm, str], levi: Union[LeviLabel, str]) -> List[Weight]:
    """
    One direction lambda per W_K-orbit of the W-orbit of the Levi's lambda.

    Args:
        form: Real form
        levi: Levi label

    Returns:
        Lexicographically largest element of each W_K-orbit, sorted descending
    """
    compact = weyl_K(form)
    seed = _LEVI_DIRECTION[LeviLabel(levi)]
    directions = {w.act(seed) for w in weyl_elements(B2)}
    reps = set()
    while directions:
        lam = next(iter(directions))
        orbit = {k.act(lam) for k in compact}
        directions -= orbit
        reps.add(max(orbit, key=lambda v: v.coords))
    return sorted(reps, key=lambda v: v.coords, reverse=True)


# Cohomology of the trivial-coefficient member for L = G: Betti numbers of the compact dual
_PRINCIPAL_DEGREES = {
    "split": (0, 2, 4, 6),
    "hyperbolic": (0, 4),
    "compact": (0,),
}


class PacketReport(BaseModel):
    """Combinatorial data of one cohomological A-packet."""

    form: str
    levi: str
    dim_p: int
    size: int
    representatives: List[str]
    degree_sets: List[List[int]]
    total_dim: int
    degree_total_expected: int
    archimedean_rate: Optional[str] = None

    @model_validator(mode="after")
    def _consistent(self) -> "PacketReport":
        if not (self.size == len(self.representatives) == len(self.degree_sets)):
            raise ValueError("size, representatives and degree_sets disagree")
        if self.total_dim != sum(len(s) for s in self.degree_sets):
            raise ValueError("total_dim is not the sum of degree set sizes")
        return self


def _lowest_degree(lam: Weight, form: RealForm) -> int:
    return sum(1 for a in form.noncompact_roots if pairing(a, lam) > 0)


def cohomology_degrees(form: Union[RealForm, str], levi: Union[LeviLabel, str]) -> PacketReport:
    """
    Degree sets {R, dim p - R} for each packet member, R = dim(u cap p).

    Args:
        form: Real form
        levi: Levi label

    Returns:
        PacketReport with one degree set per representative
    """
    form = _as_form(form)
    levi = LeviLabel(levi)
    reps = theta_parabolic_reps(form, levi)
    degree_sets = []
    for lam in reps:
        if lam.is_zero():
            degree_sets.append(list(_PRINCIPAL_DEGREES[form.label]))
            continue
        low = _lowest_degree(lam, form)
        degree_sets.append(sorted({low, form.dim_p - low}))

    arch = None
    if form.label != "compact":
        arch = str(archimedean_rate(form.label, levi))

    return PacketReport(
        form=form.label,
        levi=levi.value,
        dim_p=form.dim_p,
        size=packet_size(form, levi),
        representatives=[str(lam) for lam in reps],
        degree_sets=degree_sets,
        total_dim=sum(len(s) for s in degree_sets),
        degree_total_expected=_expected_total(form),
        archimedean_rate=arch,
    )


def _expected_total(form: RealForm) -> int:
    cosets = len(weyl_elements(B2)) // len(weyl_K(form))
    return 2 ** (B2.rank - form.rank_K) * cosets


def total_dim_check(form: Union[RealForm, str], levi: Union[LeviLabel, str]) -> bool:
    """Sum of degree set sizes equals 2^(rank G - rank K) |W_K \\ W|."""
    report = cohomology_degrees(form, levi)
    return report.total_dim == report.degree_total_expected


def packet_table() -> List[PacketReport]:
    """All twelve (form, levi) packets, forms outer, levis inner."""
    return [cohomology_degrees(f, levi) for f in FORM_LABELS for levi in LeviLabel]


def admissible_levis(lambda_E: Weight) -> Set[LeviLabel]:
    """
    Levis of Sp4(C) admissible for a coefficient system of highest weight lambda_E.

    Args:
        lambda_E: Dominant integral weight (l1 >= l2 >= 0)

    Returns:
        T always; M iff lambda_E is a multiple of e1; S iff a multiple of
        e1 + e2; G iff lambda_E = 0
    """
    l1, l2 = lambda_E.coords
    if l1.denominator != 1 or l2.denominator != 1 or not l1 >= l2 >= 0:
        raise DomainError(f"{lambda_E} is not a dominant integral weight of SO5")
    levis = {LeviLabel.T}
    if l2 == 0:
        levis.add(LeviLabel.M)
    if l1 == l2:
        levis.add(LeviLabel.S)
    if l1 == 0:
        levis.add(LeviLabel.G)
    return levis


def packet_rows(form: Optional[str] = None, levi: Optional[str] = None) -> List[Dict[str, object]]:
    """Flat rows for the `packets` subcommand."""
    rows = []
    for report in packet_table():
        if form and report.form != form:
            continue
        if levi and report.levi != levi:
            continue
        rows.append({
            "form": report.form,
            "levi": report.levi,
            "size": report.size,
            "representatives": " ".join(report.representatives),
            "degrees": " ".join("{" + ",".join(str(d) for d in s) + "}" for s in report.degree_sets),
            "total_dim": report.total_dim,
            "total_check": report.total_dim == report.degree_total_expected,
            "archimedean_rate": report.archimedean_rate or "",
        })
    return rows


if __name__ == "__main__":
    for report in packet_table():
        print(f"{report.form:10s} {report.levi}  size={report.size}  degrees={report.degree_sets}")
