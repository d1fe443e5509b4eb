"""
Walk laboratory for d-out-regular digraphs.

The walk operator splits mass equally over the d out-arcs of a vertex, so
P_x^l is the law of the non-backtracking (collision-free) walk after l
steps from x. Everything here is exact sparse iteration; only the start
set and the distance sources are sampled on large graphs, and the reports
say when that happened.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple, TypeVar, Union

import numpy as np
import scipy.linalg
from pydantic import BaseModel, model_validator
from scipy.sparse import csgraph
from tqdm import tqdm

from src.config import Settings, get_settings
from src.errors import CapExceededError, ChainNotMixingError, DomainError
from src.graphs import Digraph, random_regular_lift
from src.spherical import eigenvalue_ceiling

logger = logging.getLogger(__name__)

NORMALIZATION_TOL = 1e-12
TRIVIAL_TOL = 1e-9
DEFAULT_R_GRID = (2.5, 3.0, 4.0, 6.0, 8.0)
DENSITY_SLACK = 0.15
CUTOFF_RATIO_CEILING = 1.35
START_CHUNK = 256
T = TypeVar("T")


def _settings(settings: Optional[Settings]) -> Settings:
    return settings or get_settings()


def _check_vertex(g: Digraph, x: int) -> None:
    if not 0 <= x < g.n:
        raise DomainError(f"start vertex {x} out of range for n = {g.n}")


def _check_eps(eps) -> None:
    if not 0 < eps < 1:
        raise DomainError(f"eps must lie in (0, 1), got {eps}")


def _support_bound_ok(size: int, d: int, ell: int) -> bool:
    # d**ell can be astronomically large; compare in logs only when it could matter
    if d == 1 or ell * math.log(d) < math.log(size) + 1:
        return size <= d ** ell
    return True


def walk_distribution(g: Digraph, x: int, ell: int) -> np.ndarray:
    """
    Law of the walk after ell steps from x.

    Args:
        g: Digraph
        x: Start vertex
        ell: Number of steps (>= 0)

    Returns:
        Dense probability vector of length n
    """
    _check_vertex(g, x)
    if ell < 0:
        raise DomainError(f"ell must be non-negative, got {ell}")
    dist = np.zeros(g.n)
    dist[x] = 1.0
    for step in range(1, ell + 1):
        dist = g.forward @ dist
        support = int(np.count_nonzero(dist))
        if not _support_bound_ok(support, g.d, step):
            raise AssertionError(f"support {support} exceeds d^{step} on {g.label}")
    return dist


def validate_dist(dist: np.ndarray) -> None:
    """Raise DomainError unless dist is non-negative and sums to 1 within 1e-12."""
    if np.any(dist < 0):
        raise DomainError("distribution has negative entries")
    total = math.fsum(dist.tolist())
    if abs(total - 1.0) > NORMALIZATION_TOL:
        raise DomainError(f"distribution sums to {total!r}")


def tv_to_uniform(dist: np.ndarray) -> float:
    """Total variation distance 1/2 sum |P(y) - 1/n| to the uniform law."""
    validate_dist(dist)
    n = dist.size
    return 0.5 * math.fsum(np.abs(dist - 1.0 / n).tolist())


def _tv_columns(block: np.ndarray) -> np.ndarray:
    n = block.shape[0]
    return 0.5 * np.abs(block - 1.0 / n).sum(axis=0)


def chain_period(g: Digraph) -> int:
    """gcd of level(u) + 1 - level(v) over all arcs, levels taken from vertex 0."""
    levels = csgraph.shortest_path(g.adjacency, directed=True, unweighted=True, indices=0)
    if np.isinf(levels).any():
        return 0
    lv = levels.astype(np.int64)
    src = np.repeat(np.arange(g.n), g.d)
    diffs = np.abs(lv[src] + 1 - lv[g.out_neighbors.ravel()])
    return int(np.gcd.reduce(diffs))


def check_mixing_preconditions(g: Digraph) -> None:
    """
    Raise ChainNotMixingError unless the uniform law is the limit from every start.

    Requires in-regularity (uniform is stationary), strong connectivity and
    period 1.
    """
    uneven = np.flatnonzero(g.in_degrees != g.d)
    if uneven.size:
        v = int(uneven[0])
        raise ChainNotMixingError(
            f"{g.label}: not in-regular (vertex {v} has in-degree {g.in_degrees[v]}, d = {g.d}); "
            "uniform law is not stationary"
        )
    components, _ = csgraph.connected_components(g.adjacency, directed=True, connection="strong")
    if components > 1:
        raise ChainNotMixingError(f"{g.label}: reducible chain with {components} strong components")
    period = chain_period(g)
    if period != 1:
        raise ChainNotMixingError(f"{g.label}: periodic chain with period {period}")


def select_starts(g: Digraph, settings: Optional[Settings] = None, seed: int = 0) -> Tuple[List[int], bool]:
    """
    Start vertices over which max_x d_x(l) is taken.

    Returns:
        (sorted starts, exact) where exact means every vertex is included
    """
    settings = _settings(settings)
    if g.n <= settings.exact_start_limit:
        return list(range(g.n)), True
    starts = set()
    if g.symmetry_hint:
        starts.update(g.symmetry_hint.representatives)
    rng = np.random.default_rng(seed)
    k = min(settings.sampled_starts, g.n)
    starts.update(int(v) for v in rng.choice(g.n, size=k, replace=False))
    return sorted(starts), False


def tv_profile(g: Digraph, starts: Sequence[int], steps: int) -> np.ndarray:
    """max over starts of d_x(l) for l = 0..steps."""
    worst = np.zeros(steps + 1)
    for lo in range(0, len(starts), START_CHUNK):
        chunk = list(starts[lo:lo + START_CHUNK])
        block = np.zeros((g.n, len(chunk)))
        block[chunk, np.arange(len(chunk))] = 1.0
        for ell in range(steps + 1):
            if ell:
                block = g.forward @ block
            worst[ell] = max(worst[ell], _tv_columns(block).max())
    return worst


def mixing_time(
    g: Digraph,
    eps: Union[float, Fraction] = 0.25,
    starts: Optional[Sequence[int]] = None,
    settings: Optional[Settings] = None,
    seed: int = 0,
) -> int:
    """
    t_mix(eps) = min{ l : max_x d_x(l) <= eps }.

    Args:
        g: Strongly connected, aperiodic, in-regular digraph
        eps: Threshold in (0, 1)
        starts: Start vertices; defaults to select_starts
        settings: Caps (walk_step_cap, start limits)
        seed: Seed for start sampling on large graphs

    Returns:
        Smallest l at which every start is within eps of uniform
    """
    _check_eps(eps)
    settings = _settings(settings)
    check_mixing_preconditions(g)
    if starts is None:
        starts, _ = select_starts(g, settings, seed)
    eps = float(eps)

    t_mix = 0
    for lo in range(0, len(starts), START_CHUNK):
        chunk = list(starts[lo:lo + START_CHUNK])
        block = np.zeros((g.n, len(chunk)))
        block[chunk, np.arange(len(chunk))] = 1.0
        ell = 0
        # d_x(l) is non-increasing for a doubly stochastic chain, so resume from the running max
        while ell < t_mix:
            block = g.forward @ block
            ell += 1
        while _tv_columns(block).max() > eps:
            if ell >= settings.walk_step_cap:
                raise CapExceededError(
                    f"{g.label}: no mixing within {settings.walk_step_cap} steps"
                )
            block = g.forward @ block
            ell += 1
        t_mix = ell
    logger.debug("%s: t_mix(%s) = %d over %d starts", g.label, eps, t_mix, len(starts))
    return t_mix


def lower_bound(n: int, d: int, eps: Union[float, Fraction] = 0.25) -> int:
    """
    Smallest l with d^l >= (1 - eps) n, i.e. ceil(log_d n - log_d(1/(1 - eps))).

    Args:
        n: Number of vertices
        d: Out-degree, >= 2
        eps: Threshold in (0, 1), taken exactly

    Returns:
        Non-negative integer lower bound for t_mix(eps)
    """
    if d < 2:
        raise DomainError(f"lower bound needs d >= 2, got {d}")
    _check_eps(eps)
    target = (1 - Fraction(eps)) * n
    ell = 0
    while d ** ell < target:
        ell += 1
    return ell


class DistanceProfile(BaseModel):
    """Histogram of directed distances from a set of sources."""

    n: int
    sources: int
    counts: List[int]
    exact: bool

    @property
    def diameter(self) -> int:
        return len(self.counts) - 1

    def almost_diameter(self, eps) -> int:
        """Smallest R with #{(x, y) : dist(x, y) > R} <= eps n^2 (scaled up when sampled)."""
        _check_eps(eps)
        scale = Fraction(self.n, self.sources)
        budget = Fraction(eps) * self.n * self.n
        beyond = Fraction(0)
        for radius in range(self.diameter, -1, -1):
            if beyond + scale * self.counts[radius] > budget:
                return radius
            beyond += scale * self.counts[radius]
        return 0


def distance_profile(
    g: Digraph,
    settings: Optional[Settings] = None,
    seed: int = 0,
) -> DistanceProfile:
    """
    BFS distance histogram from all sources (n <= exact_start_limit) or a seeded sample.

    Raises:
        DomainError: if some vertex is unreachable
    """
    settings = _settings(settings)
    sources, exact = select_starts(g, settings, seed)
    chunk = max(1, (1 << 22) // g.n)
    hist = np.zeros(1, dtype=np.int64)
    for lo in range(0, len(sources), chunk):
        dist = csgraph.shortest_path(
            g.adjacency, directed=True, unweighted=True, indices=sources[lo:lo + chunk]
        )
        if np.isinf(dist).any():
            raise DomainError(f"{g.label}: graph is not strongly connected")
        counts = np.bincount(dist.astype(np.int64).ravel())
        if counts.size > hist.size:
            counts[:hist.size] += hist
            hist = counts
        else:
            hist[:counts.size] += counts
    return DistanceProfile(n=g.n, sources=len(sources), counts=hist.tolist(), exact=exact)


def diameter(g: Digraph, settings: Optional[Settings] = None) -> int:
    return distance_profile(g, settings).diameter


def almost_diameter(g: Digraph, eps=0.1, settings: Optional[Settings] = None) -> int:
    return distance_profile(g, settings).almost_diameter(eps)


class SpectrumReport(BaseModel):
    """Eigenvalue magnitudes of T = A / d and the slow-mode counts N(r)."""

    graph_id: str
    n: int
    d: int
    mode: str
    magnitudes: List[float]
    trivial_count: int
    top_nontrivial: float
    r_grid: List[float]
    density_counts: List[int]
    counts_exact: List[bool]

    @model_validator(mode="after")
    def _stochastic(self) -> "SpectrumReport":
        if any(m > 1 + TRIVIAL_TOL for m in self.magnitudes):
            raise ValueError("eigenvalue magnitude above 1")
        if self.trivial_count < 1:
            raise ValueError("no eigenvalue of magnitude 1")
        if not (len(self.r_grid) == len(self.density_counts) == len(self.counts_exact)):
            raise ValueError("r_grid and density counts disagree")
        return self

    def count_at(self, r: float) -> Tuple[int, bool]:
        return _density_count(self.mode, self.magnitudes, self.trivial_count, self.top_nontrivial, self.d, r)


def _density_count(mode: str, magnitudes, trivial: int, top: float, d: int, r: float,
                   tol: float = 1e-6) -> Tuple[int, bool]:
    """N(r) = #{nontrivial |lambda| >= d^(-1/r)}, with an exactness flag."""
    threshold = eigenvalue_ceiling(r, d)
    if mode == "dense":
        return sum(1 for m in magnitudes[trivial:] if m >= threshold), True
    if top < threshold - tol:
        return 0, True
    return 1, False


def top_nontrivial_magnitude(g: Digraph, steps: int = 400, seed: int = 0) -> float:
    """
    Deflated power iteration on the mean-zero subspace.

    Args:
        g: Digraph with doubly stochastic T
        steps: Iterations; the growth rate is averaged over the second half
        seed: Seed for the start vector

    Returns:
        Estimate of the largest nontrivial eigenvalue magnitude
    """
    rng = np.random.default_rng(seed)
    vec = rng.standard_normal(g.n)
    vec -= vec.mean()
    vec /= np.linalg.norm(vec)
    logs = []
    for _ in range(steps):
        vec = g.forward @ vec
        vec -= vec.mean()
        norm = np.linalg.norm(vec)
        if norm == 0.0:
            return 0.0
        logs.append(math.log(norm))
        vec /= norm
    tail = logs[len(logs) // 2:]
    return float(math.exp(math.fsum(tail) / len(tail)))


def spectrum(
    g: Digraph,
    r_grid: Sequence[float] = DEFAULT_R_GRID,
    dense_limit: Optional[int] = None,
    mode: str = "dense",
    steps: int = 400,
    seed: int = 0,
) -> SpectrumReport:
    """
    Spectrum of T = A / d with density counts on a grid of rates.

    Args:
        g: Digraph
        r_grid: Rates r at which N(r) is counted
        dense_limit: Largest n for a dense eigensolve (default from settings)
        mode: "dense", "power" or "auto" (dense below the limit, power above)
        steps: Power-iteration steps in power mode
        seed: Power-iteration seed

    Returns:
        SpectrumReport; in power mode magnitudes holds only [1, top estimate]
    """
    dense_limit = dense_limit or get_settings().dense_limit
    if mode not in ("dense", "power", "auto"):
        raise DomainError(f"unknown spectrum mode {mode!r}")
    if mode == "auto":
        mode = "dense" if g.n <= dense_limit else "power"
    if mode == "dense" and g.n > dense_limit:
        raise CapExceededError(
            f"{g.label}: n = {g.n} exceeds the dense limit {dense_limit}; "
            "use power mode for the top magnitudes only"
        )

    if mode == "dense":
        eigenvalues = np.linalg.eigvals(g.transition.toarray())
        magnitudes = sorted((float(m) for m in np.abs(eigenvalues)), reverse=True)
        trivial = sum(1 for m in magnitudes if m >= 1 - TRIVIAL_TOL)
        top = magnitudes[trivial] if trivial < len(magnitudes) else 0.0
    else:
        top = top_nontrivial_magnitude(g, steps, seed)
        magnitudes = [1.0, top]
        trivial = 1

    grid = [float(r) for r in r_grid]
    pairs = [_density_count(mode, magnitudes, trivial, top, g.d, r) for r in grid]
    inexact = [r for r, (_, exact) in zip(grid, pairs) if not exact]
    if inexact:
        logger.warning(
            "%s: top magnitude %.6f is near the ceiling at r = %s; N(r) is a lower bound",
            g.label, top, inexact,
        )
    return SpectrumReport(
        graph_id=g.label,
        n=g.n,
        d=g.d,
        mode=mode,
        magnitudes=magnitudes,
        trivial_count=trivial,
        top_nontrivial=top,
        r_grid=grid,
        density_counts=[c for c, _ in pairs],
        counts_exact=[e for _, e in pairs],
    )


class DensityVerdict(BaseModel):
    """Least-squares growth exponent of N(r) across a family."""

    r: float
    ns: List[int]
    counts: List[int]
    slope: float
    allowed: float
    passed: bool


def density_check(
    family: Sequence[Union[SpectrumReport, Tuple[Digraph, SpectrumReport]]],
    r: float,
) -> DensityVerdict:
    """
    Fit log(1 + N(r)) against log n and compare the slope with 2/r + 0.15.

    Args:
        family: SpectrumReports (or (Digraph, SpectrumReport) pairs) of distinct sizes
        r: Rate

    Returns:
        DensityVerdict with PASS iff slope <= 2/r + 0.15
    """
    reports = [item[1] if isinstance(item, tuple) else item for item in family]
    reports = sorted(reports, key=lambda rep: rep.n)
    ns = [rep.n for rep in reports]
    if len(set(ns)) < 3:
        raise DomainError(f"density check needs >= 3 distinct sizes, got {len(set(ns))}")
    counts = [rep.count_at(r)[0] for rep in reports]
    slope = float(np.polyfit(np.log(ns), np.log1p(counts), 1)[0])
    allowed = 2.0 / r + DENSITY_SLACK
    return DensityVerdict(r=r, ns=ns, counts=counts, slope=slope, allowed=allowed, passed=slope <= allowed)


class PowerNormProfile(BaseModel):
    """||B^l||^(1/l) for l = 1..l_max with the polynomial-times-exponential check."""

    values: List[float]
    spectral_radius: float
    fitted_c: float
    degree: int
    bound_holds: bool


def matrix_power_norm_profile(matrix: np.ndarray, ell_max: int) -> PowerNormProfile:
    """
    Operator norms of powers of a square matrix.

    The bound ||B^l|| <= c l^s lambda^l uses s = matrix size and fits c at l = 1.

    Args:
        matrix: Square matrix
        ell_max: Largest power

    Returns:
        PowerNormProfile
    """
    matrix = np.asarray(matrix, dtype=float)
    if ell_max < 1:
        raise DomainError(f"ell_max must be >= 1, got {ell_max}")
    s = matrix.shape[0]
    lam = float(np.abs(np.linalg.eigvals(matrix)).max())
    power = matrix.copy()
    norms = []
    for ell in range(1, ell_max + 1):
        if ell > 1:
            power = power @ matrix
        norms.append(float(scipy.linalg.svdvals(power)[0]))

    values = [norm ** (1.0 / ell) for ell, norm in enumerate(norms, start=1)]
    if lam <= TRIVIAL_TOL:
        c = norms[0]
        holds = all(norm <= 1e-9 for norm in norms[s - 1:])
    else:
        c = norms[0] / lam
        log_c = math.log(c) if c > 0 else -math.inf
        holds = all(
            norm == 0 or math.log(norm) <= log_c + s * math.log(ell) + ell * math.log(lam) + 1e-9
            for ell, norm in enumerate(norms, start=1)
        )
    return PowerNormProfile(values=values, spectral_radius=lam, fitted_c=c, degree=s, bound_holds=holds)


def power_norm_profile(g: Digraph, ell_max: int, dense_limit: Optional[int] = None) -> PowerNormProfile:
    """Profile of T restricted to the complement of the constants: B = T (I - J/n)."""
    dense_limit = dense_limit or get_settings().dense_limit
    if g.n > dense_limit:
        raise CapExceededError(f"{g.label}: n = {g.n} exceeds the dense limit {dense_limit}")
    t = g.transition.toarray()
    projector = np.eye(g.n) - np.full((g.n, g.n), 1.0 / g.n)
    return matrix_power_norm_profile(t @ projector, ell_max)


def collision_free_check(g: Digraph, x: int, horizon: int) -> Optional[Tuple[int, int]]:
    """
    First pair (a, b), a < b <= horizon, whose step-a and step-b supports meet.

    Pairs are ordered by b, then a.

    Args:
        g: Digraph
        x: Start vertex
        horizon: Last step inspected

    Returns:
        (a, b) or None if the supports stay pairwise disjoint
    """
    _check_vertex(g, x)
    first_seen = np.full(g.n, -1, dtype=np.int64)
    first_seen[x] = 0
    frontier = np.array([x])
    for step in range(1, horizon + 1):
        frontier = np.unique(g.out_neighbors[frontier].ravel())
        seen = first_seen[frontier]
        earlier = seen[seen >= 0]
        if earlier.size:
            return int(earlier.min()), step
        first_seen[frontier] = step
    return None


class CoveringReport(BaseModel):
    """Ball-growth radii from the identity and their ratios to log_d n."""

    n: int
    d: int
    eps: float
    radius_all: int
    radius_mu: int
    log_d_n: float
    kappa: float
    kappa_mu: float
    ball_sizes: List[int]

    @model_validator(mode="after")
    def _doubling(self) -> "CoveringReport":
        if self.radius_mu > self.radius_all:
            raise ValueError("almost-covering radius exceeds covering radius")
        if self.eps < 0.5 and self.radius_all > 2 * self.radius_mu + 1:
            raise ValueError(
                f"covering radius {self.radius_all} exceeds 2 * {self.radius_mu} + 1"
            )
        return self


def covering_exponents(g: Digraph, eps=0.1) -> CoveringReport:
    """
    Covering exponents of a vertex-transitive digraph from BFS balls around vertex 0.

    Args:
        g: Vertex-transitive digraph (e.g. a Cayley digraph), d >= 2
        eps: Fraction of vertices allowed to stay uncovered for kappa_mu

    Returns:
        CoveringReport with raw radii and kappa = radius / log_d n
    """
    if g.d < 2:
        raise DomainError("covering exponents need d >= 2 (degenerate growth)")
    if not g.is_vertex_transitive:
        raise DomainError(f"{g.label}: covering exponents need a vertex-transitive graph")
    _check_eps(eps)
    levels = csgraph.shortest_path(g.adjacency, directed=True, unweighted=True, indices=0)
    if np.isinf(levels).any():
        raise DomainError(f"{g.label}: graph is not strongly connected")
    balls = np.cumsum(np.bincount(levels.astype(np.int64))).tolist()
    target = (1 - Fraction(eps)) * g.n
    radius_mu = next(r for r, size in enumerate(balls) if size >= target)
    radius_all = len(balls) - 1
    log_d_n = math.log(g.n) / math.log(g.d)
    ratio = (lambda r: r / log_d_n) if log_d_n > 0 else (lambda r: 0.0)
    return CoveringReport(
        n=g.n,
        d=g.d,
        eps=float(eps),
        radius_all=radius_all,
        radius_mu=radius_mu,
        log_d_n=log_d_n,
        kappa=ratio(radius_all),
        kappa_mu=ratio(radius_mu),
        ball_sizes=balls,
    )


def trace_projection_identity(basis: np.ndarray) -> Tuple[float, int]:
    """
    sum_y ||M 1_y||^2 for the orthogonal projection M onto span(basis), and dim span.

    The two agree because the sum is trace(M* M) = trace(M).
    """
    u = scipy.linalg.orth(np.asarray(basis))
    projector = u @ u.conj().T
    lhs = float(np.sum(np.abs(projector) ** 2))
    return lhs, u.shape[1]


def slow_eigenspace(g: Digraph, r: float, dense_limit: Optional[int] = None) -> np.ndarray:
    """Eigenvectors of T whose nontrivial eigenvalues have |lambda| >= d^(-1/r)."""
    dense_limit = dense_limit or get_settings().dense_limit
    if g.n > dense_limit:
        raise CapExceededError(f"{g.label}: n = {g.n} exceeds the dense limit {dense_limit}")
    eigenvalues, vectors = np.linalg.eig(g.transition.toarray())
    mags = np.abs(eigenvalues)
    keep = (mags >= eigenvalue_ceiling(r, g.d)) & (mags < 1 - TRIVIAL_TOL)
    return vectors[:, keep]


class WalkReport(BaseModel):
    """One row of the `walk` subcommand."""

    graph_id: str
    seed: int
    n: int
    d: int
    eps: float
    t_mix: int
    log_d_n: float
    cutoff_ratio: float
    lower_bound: int
    ad_eps: float
    almost_diameter: int
    diameter: int
    collision_horizon: int
    first_collision: Optional[str] = None
    starts_exact: bool
    distances_exact: bool

    @model_validator(mode="after")
    def _hard_bounds(self) -> "WalkReport":
        if self.lower_bound > self.t_mix:
            raise ValueError(f"lower bound {self.lower_bound} exceeds t_mix {self.t_mix}")
        if self.almost_diameter > self.diameter:
            raise ValueError("almost diameter exceeds diameter")
        return self


def walk_report(
    g: Digraph,
    eps: Union[float, Fraction] = 0.25,
    ad_eps: Union[float, Fraction] = 0.1,
    horizon: Optional[int] = None,
    seed: int = 0,
    settings: Optional[Settings] = None,
) -> WalkReport:
    """
    Mixing, distance and collision data for one digraph.

    Args:
        g: Digraph with d >= 2
        eps: Mixing threshold
        ad_eps: Pair fraction discarded by the almost diameter
        horizon: Collision horizon; defaults to ceil(log_d n)
        seed: Seed for start and source sampling
        settings: Caps

    Returns:
        WalkReport; the hard bounds are enforced on construction
    """
    settings = _settings(settings)
    starts, starts_exact = select_starts(g, settings, seed)
    t_mix = mixing_time(g, eps, starts=starts, settings=settings)
    bound = lower_bound(g.n, g.d, eps)
    profile = distance_profile(g, settings, seed)
    ad = profile.almost_diameter(ad_eps)
    log_d_n = math.log(g.n) / math.log(g.d)

    if starts_exact and profile.exact and profile.almost_diameter(eps) > t_mix:
        raise AssertionError(f"{g.label}: AD({eps}) exceeds t_mix({eps})")
    if g.is_vertex_transitive and ad_eps < 0.5 and profile.diameter > 2 * ad:
        raise AssertionError(f"{g.label}: diameter {profile.diameter} exceeds 2 AD = {2 * ad}")

    horizon = horizon if horizon is not None else math.ceil(log_d_n)
    collision = collision_free_check(g, starts[0], horizon)
    return WalkReport(
        graph_id=g.label,
        seed=seed,
        n=g.n,
        d=g.d,
        eps=float(eps),
        t_mix=t_mix,
        log_d_n=log_d_n,
        cutoff_ratio=t_mix / log_d_n if log_d_n > 0 else 0.0,
        lower_bound=bound,
        ad_eps=float(ad_eps),
        almost_diameter=ad,
        diameter=profile.diameter,
        collision_horizon=horizon,
        first_collision=None if collision is None else f"{collision[0]}-{collision[1]}",
        starts_exact=starts_exact,
        distances_exact=profile.exact,
    )


def run_jobs(jobs: Sequence[Callable[[], T]], threads: Optional[int] = None) -> List[T]:
    """
    Run independent jobs on a thread pool capped by DENSITOMETER_THREADS.

    Results come back in submission order.
    """
    threads = threads or get_settings().threads
    if threads == 1 or len(jobs) <= 1:
        return [job() for job in jobs]
    with ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(lambda job: job(), jobs))


class FamilyReport(BaseModel):
    """Walk reports of a family of random lifts, per-size medians and the density verdict."""

    walks: List[WalkReport]
    medians: Dict[int, float]
    spectra: List[SpectrumReport]
    density: DensityVerdict

    @property
    def medians_non_increasing(self) -> bool:
        ratios = list(self.medians.values())
        return all(b <= a + 1e-12 for a, b in zip(ratios, ratios[1:]))


def cutoff_family(
    base_sizes: Sequence[int],
    seeds: Sequence[int],
    k: int = 3,
    eps: Union[float, Fraction] = 0.25,
    r: float = 3.0,
    dense_sizes: int = 2,
    settings: Optional[Settings] = None,
    progress: bool = False,
) -> FamilyReport:
    """
    Cutoff and spectral density experiment on NB lifts of random k-regular graphs.

    Args:
        base_sizes: Vertex counts of the base graphs (each lift has k times as many)
        seeds: Seeds per size; one walk report per (size, seed)
        k: Base degree
        eps: Mixing threshold
        r: Rate for the density check
        dense_sizes: How many of the smallest sizes get a dense spectrum; the rest use power mode
        settings: Caps and thread count
        progress: Show a tqdm bar over the sizes

    Returns:
        FamilyReport with walks ordered by size, then seed
    """
    settings = _settings(settings)
    sizes = sorted(base_sizes)
    if len(set(sizes)) < 3:
        raise DomainError(f"a family needs >= 3 distinct sizes, got {sizes}")
    if not seeds:
        raise DomainError("a family needs at least one seed")

    walks: List[WalkReport] = []
    spectra: List[SpectrumReport] = []
    for index, base_n in enumerate(tqdm(sizes, desc="family", disable=not progress)):
        graphs = [random_regular_lift(base_n, k, seed) for seed in seeds]
        jobs = [
            (lambda g=g, seed=seed: walk_report(g, eps=eps, seed=seed, settings=settings))
            for g, seed in zip(graphs, seeds)
        ]
        walks.extend(run_jobs(jobs, settings.threads))
        g = graphs[0]
        if index < dense_sizes:
            spectra.append(spectrum(g, r_grid=[r], dense_limit=max(g.n, settings.dense_limit), mode="dense"))
        else:
            spectra.append(spectrum(g, r_grid=[r], mode="power", seed=seeds[0]))
        logger.info("%s: lift n = %d done", g.label, g.n)

    medians = {}
    for walk in walks:
        medians.setdefault(walk.n, []).append(walk.cutoff_ratio)
    return FamilyReport(
        walks=walks,
        medians={n: float(np.median(ratios)) for n, ratios in medians.items()},
        spectra=spectra,
        density=density_check(spectra, r),
    )


def check_cutoff_family(family: FamilyReport, ceiling: float = CUTOFF_RATIO_CEILING) -> None:
    """
    Raise AssertionError unless every instance mixes by ceiling * log_d n, the
    median ratios do not increase with n, and the density check passes.
    """
    for walk in family.walks:
        if not walk.lower_bound <= walk.t_mix <= ceiling * walk.log_d_n:
            raise AssertionError(
                f"{walk.graph_id}: t_mix = {walk.t_mix} outside [{walk.lower_bound}, "
                f"{ceiling} * {walk.log_d_n:.3f}]"
            )
    if not family.medians_non_increasing:
        raise AssertionError(f"median cutoff ratios increase along the family: {family.medians}")
    if not family.density.passed:
        raise AssertionError(
            f"density slope {family.density.slope:.4f} exceeds {family.density.allowed:.4f} at r = {family.density.r}"
        )


def start_independence(g: Digraph, ell: int, starts: Sequence[int]) -> float:
    """Spread max - min of d_x(ell) over the given starts (0 on transitive graphs)."""
    values = [tv_to_uniform(walk_distribution(g, x, ell)) for x in starts]
    return max(values) - min(values)


if __name__ == "__main__":
    import networkx as nx

    from src.graphs import nonbacktracking_lift

    g = nonbacktracking_lift(nx.petersen_graph(), arc_transitive=True, label="nb-petersen")
    print(walk_report(g).model_dump())
    print(spectrum(g).top_nontrivial)
