"""
L^r integrability of unramified matrix coefficients via Macdonald's formula.

The exact tests quantify over the fundamental coweights, which span the
dominant cone. The truncated sums replace Macdonald's constants by 1, so
they track convergence and divergence but not the constant in front.
"""

import logging
import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, List, Tuple, Union

import numpy as np
import sympy
from scipy.special import logsumexp

from src.arthur import INFINITY, RateValue, check_dominance_interval
from src.errors import CapExceededError, DomainError
from src.lie_core import (
    Coweight,
    RootDatum,
    Weight,
    is_dominant,
    pairing,
    weyl_elements,
)

logger = logging.getLogger(__name__)

THRESHOLD_STEP = Fraction(1, 10**6)
FLOAT_LOG_MAX = math.log(sys.float_info.max)


@dataclass(frozen=True)
class UnramifiedParam:
    """Satake parameter nu of an unramified representation at residue size p."""

    nu: Weight
    p: int

    def __post_init__(self):
        if int(self.p) < 2:
            raise DomainError(f"residue field size must be >= 2, got {self.p}")

    def validate(self, rd: RootDatum) -> None:
        check_dominance_interval(self.nu, rd)


def _check_rate(r) -> Fraction:
    r = Fraction(r)
    if r < 2:
        raise DomainError(f"r must be >= 2, got {r}")
    return r


def _exponent_pairings(param: UnramifiedParam, rd: RootDatum) -> List[Tuple[Fraction, Fraction]]:
    """(a, b) per fundamental coweight w with <2 rho + r (nu - rho), w> = a + r b."""
    rho = rd.weyl_vector
    return [
        (pairing(rho * 2, cw), pairing(param.nu - rho, cw))
        for cw in rd.fundamental_coweights
    ]


def lr_converges(param: UnramifiedParam, r, rd: RootDatum) -> bool:
    """
    Whether sum over dominant lambda of p^<2 rho + r (nu - rho), lambda> converges.

    Args:
        param: Unramified parameter with 0 <= nu <= rho
        r: Exponent r >= 2 (exact)
        rd: Root datum

    Returns:
        True iff <2 rho + r (nu - rho), w> < 0 for every fundamental coweight w
    """
    r = _check_rate(r)
    param.validate(rd)
    return all(a + r * b < 0 for a, b in _exponent_pairings(param, rd))


def decay_threshold(param: UnramifiedParam, rd: RootDatum) -> RateValue:
    """
    Infimum of the r for which lr_converges holds.

    Solves the affine constraints a + r b < 0 that lr_converges tests (b <= 0
    on the dominance interval; b = 0 means the constraint never holds), then
    checks that lr_converges fails at the root and holds just above it.
    """
    param.validate(rd)
    threshold = Fraction(2)
    for a, b in _exponent_pairings(param, rd):
        if b == 0:
            return INFINITY
        threshold = max(threshold, a / -b)
    if lr_converges(param, threshold, rd) or not lr_converges(param, threshold + THRESHOLD_STEP, rd):
        raise AssertionError(f"threshold {threshold} does not separate divergence from convergence")
    return RateValue.finite(threshold)


def _check_dominant_coweight(lam: Coweight, rd: RootDatum) -> None:
    if lam.rank != rd.rank or not is_dominant(lam, rd):
        raise DomainError(f"{lam} is not a dominant coweight of {rd}")


def macdonald_profile(param: UnramifiedParam, lam: Coweight, rd: RootDatum, exact: bool = False):
    """
    Surrogate |c(lambda)| = sum_w p^<w.nu - rho, lambda> with Macdonald's constants set to 1.

    Args:
        param: Unramified parameter
        lam: Dominant coweight
        rd: Root datum
        exact: Return a sympy expression instead of a float

    Returns:
        Float (or exact sympy value) of the W-sum
    """
    _check_dominant_coweight(lam, rd)
    rho = rd.weyl_vector
    exponents = [pairing(w.act(param.nu) - rho, lam) for w in weyl_elements(rd)]
    if exact:
        p = sympy.Integer(param.p)
        return sympy.Add(*(p ** sympy.Rational(e.numerator, e.denominator) for e in exponents))
    return math.fsum(float(param.p) ** float(e) for e in exponents)


def _lattice(rd: RootDatum, radius: int) -> np.ndarray:
    coweights = np.array([[float(c) for c in cw.coords] for cw in rd.fundamental_coweights])
    coeffs = np.array(list(product(range(radius + 1), repeat=rd.rank)), dtype=float)
    return coeffs @ coweights


def _log_terms(param: UnramifiedParam, r: float, rd: RootDatum, radius: int) -> np.ndarray:
    """log_p of each summand p^<2 rho, lambda> |c(lambda)|^r on the coefficient box."""
    lams = _lattice(rd, radius)
    rho = np.array([float(c) for c in rd.weyl_vector.coords])
    images = np.array(
        [[float(c) for c in w.act(param.nu).coords] for w in weyl_elements(rd)]
    )
    exps = lams @ (images - rho).T
    top = exps.max(axis=1)
    base = float(param.p)
    # factor out the dominant term
    inner = np.log(np.power(base, exps - top[:, None]).sum(axis=1)) / math.log(base)
    return lams @ (2 * rho) + r * (top + inner)


def _checked_log_terms(param: UnramifiedParam, r, radius: int, rd: RootDatum) -> np.ndarray:
    r = _check_rate(r)
    param.validate(rd)
    if radius < 0:
        raise DomainError(f"radius must be non-negative, got {radius}")
    return _log_terms(param, float(r), rd, radius)


def lr_partial_log_sum(param: UnramifiedParam, r, radius: int, rd: RootDatum) -> float:
    """log_p of lr_partial_sum; stays finite at radii where the sum itself overflows."""
    logs = _checked_log_terms(param, r, radius, rd)
    ln_p = math.log(param.p)
    return float(logsumexp(logs * ln_p) / ln_p)


def lr_partial_sum(param: UnramifiedParam, r, radius: int, rd: RootDatum) -> float:
    """
    Truncated sum over lambda = sum a_i w_i, 0 <= a_i <= radius.

    Args:
        param: Unramified parameter with 0 <= nu <= rho
        r: Exponent r >= 2
        radius: Box size; 0 gives the single lambda = 0 term |W|^r
        rd: Root datum

    Returns:
        Partial sum, summed with math.fsum for a fixed rounding

    Raises:
        CapExceededError: if the sum does not fit in a float (see lr_partial_log_sum)
    """
    logs = _checked_log_terms(param, r, radius, rd)
    ln_p = math.log(param.p)
    log_total = float(logsumexp(logs * ln_p))
    if log_total > FLOAT_LOG_MAX:
        raise CapExceededError(
            f"partial sum at radius {radius} is about p^{log_total / ln_p:.1f} and overflows a float"
        )
    return math.fsum(np.power(float(param.p), logs).tolist())


def partial_sum_series(param: UnramifiedParam, r, radii: Iterable[int], rd: RootDatum) -> List[Tuple[int, float]]:
    """(radius, partial sum) pairs, for the `spherical` subcommand."""
    return [(radius, lr_partial_sum(param, r, radius, rd)) for radius in radii]


def rate_from_eigenvalue(lambda_abs: float, d: int) -> RateValue:
    """
    Invert lambda = d^(-1/r): r = ln d / ln(1/lambda), clamped below at 2.

    Args:
        lambda_abs: Eigenvalue magnitude in (0, 1]
        d: Branching number, >= 2

    Returns:
        Rate; lambda_abs = 1 gives infinity
    """
    if not 0 < lambda_abs <= 1:
        raise DomainError(f"eigenvalue magnitude must lie in (0, 1], got {lambda_abs}")
    if d < 2:
        raise DomainError(f"d must be >= 2, got {d}")
    if lambda_abs == 1:
        return INFINITY
    r = math.log(d) / math.log(1 / lambda_abs)
    return RateValue.finite(max(2.0, r))


def eigenvalue_ceiling(rate: Union[RateValue, float, Fraction], d: int) -> float:
    """d^(-1/r), the largest eigenvalue magnitude allowed at rate r."""
    if not isinstance(rate, RateValue):
        rate = RateValue.finite(rate)
    if rate.is_infinite:
        return 1.0
    return float(d) ** (-1.0 / float(rate.value))


if __name__ == "__main__":
    from src.lie_core import build_root_datum

    b2 = build_root_datum("B", 2)
    param = UnramifiedParam(Weight.of(Fraction(1, 2), 0), 3)
    print(f"threshold: {decay_threshold(param, b2)}")
    for r in (Fraction(5, 2), Fraction(7, 2)):
        s20 = lr_partial_sum(param, r, 20, b2)
        s40 = lr_partial_sum(param, r, 40, b2)
        print(f"r={r}: sum(40)/sum(20) = {s40 / s20:.6f}")
