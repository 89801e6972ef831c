"""Extremal rays of the class with fixed mean and pairwise correlation.

Fixing mean and equicorrelation pins two raw moments of the count: its
mean ``m = d*p`` and its raw second moment
``M = d*p + d*(d-1)*mu2``. Extreme points of the resulting polytope
carry at most three support points. For strictly increasing ``i < j < k``
the two moment equations plus normalization have the unique solution

    mass_i =  (j*k - (j+k)*m + M) / ((j-i)*(k-i))
    mass_j = -(i*k - (i+k)*m + M) / ((j-i)*(k-j))
    mass_k =  (i*j - (i+j)*m + M) / ((k-i)*(k-j))

which sums to one identically, so a triple yields a ray exactly when all
three masses are nonnegative. Rays with fewer support points arise as
degenerate triples: a vanishing mass drops its point. Enumeration scans
all triples, adds the mean-class two-point rays whose second moment
matches ``M``, and the point mass when both targets sit on an integer.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import rays_mean
from .errors import IndexOutOfRange, InfeasibleMoment, InvalidSpec
from .pmf import (
    ClassSpec,
    DefaultCountPmf,
    MEAN_RESIDUAL_SCALE,
    SECOND_MOMENT_RESIDUAL_SCALE,
)
from .rays_mean import MeanCorr, RayDensity

# A computed mass this close to zero marks a dropped support point; the
# Cramer formulas at d ~ 100 accumulate roundoff near 1e-13.
ZERO_MASS_TOL = 1e-12

# Second-moment slack when matching two-point rays and the point ray
# against the target; scales with the d**2 magnitude of the moment.
_MATCH_SCALE = 1e-12

# Slack when testing the target moment against the closed class bounds.
_FEASIBILITY_TOL = 1e-12


@dataclass(frozen=True)
class CorrSystemCoeffs:
    """Centered constraint rows for the two-moment system.

    ``alpha[j] = j - m`` and ``beta[j] = j**2 - M``; a pmf satisfies the
    class constraints iff both dot products with its probabilities
    vanish. Rows are read-only arrays of length ``d + 1``.
    """

    d: int
    alpha: np.ndarray
    beta: np.ndarray

    @classmethod
    def from_spec(cls, spec: ClassSpec) -> "CorrSystemCoeffs":
        if spec.rho is None:
            raise InvalidSpec("CorrSystemCoeffs requires a correlation target")
        j = np.arange(spec.d + 1, dtype=float)
        alpha = j - spec.mean_count
        beta = j * j - spec.second_moment_target
        alpha.setflags(write=False)
        beta.setflags(write=False)
        return cls(spec.d, alpha, beta)


@dataclass(frozen=True)
class MembershipResult:
    """Outcome of a class-membership test, with signed residuals."""

    is_member: bool
    mean_residual: float
    second_moment_residual: float

    def __bool__(self) -> bool:
        return self.is_member


def _require_corr(spec: ClassSpec, op: str) -> None:
    if spec.rho is None:
        raise InvalidSpec(f"{op} requires a spec with a correlation target")


def triple_ray(spec: ClassSpec, i: int, j: int, k: int) -> RayDensity | None:
    """Solve the two-moment system on support ``{i, j, k}``.

    Returns None when some mass is negative beyond tolerance, i.e. the
    triple carries no ray of this class. A mass within ``1e-12`` of zero
    drops its support point, so the result may be a two-point or point
    ray. The 2x3 subsystem is never rank deficient for distinct indices:
    a nonzero quadratic cannot vanish at three points.
    """
    _require_corr(spec, "triple_ray")
    i, j, k = int(i), int(j), int(k)
    if not 0 <= i < j < k <= spec.d:
        raise IndexOutOfRange(
            f"need 0 <= i < j < k <= {spec.d}, got ({i}, {j}, {k})"
        )
    m = spec.mean_count
    big_m = spec.second_moment_target
    raw = (
        (j * k - (j + k) * m + big_m) / ((j - i) * (k - i)),
        -(i * k - (i + k) * m + big_m) / ((j - i) * (k - j)),
        (i * j - (i + j) * m + big_m) / ((k - i) * (k - j)),
    )
    if min(raw) < -ZERO_MASS_TOL:
        return None
    support = []
    masses = []
    for s, mass in zip((i, j, k), raw):
        if mass > ZERO_MASS_TOL:
            support.append(s)
            masses.append(mass)
    total = math.fsum(masses)
    return RayDensity(
        spec.d,
        tuple(support),
        tuple(mass / total for mass in masses),
        MeanCorr(spec.p, spec.rho),
    )


def _scan_triples(spec: ClassSpec) -> dict[tuple[int, ...], RayDensity]:
    """Vectorized sweep of all index triples; same arithmetic as
    :func:`triple_ray`, keyed and deduplicated by support set."""
    d = spec.d
    m = spec.mean_count
    big_m = spec.second_moment_target
    idx = np.array(
        list(itertools.combinations(range(d + 1), 3)), dtype=np.int64
    )
    i = idx[:, 0].astype(float)
    j = idx[:, 1].astype(float)
    k = idx[:, 2].astype(float)
    mass_i = (j * k - (j + k) * m + big_m) / ((j - i) * (k - i))
    mass_j = -(i * k - (i + k) * m + big_m) / ((j - i) * (k - j))
    mass_k = (i * j - (i + j) * m + big_m) / ((k - i) * (k - j))
    keep = (
        (mass_i >= -ZERO_MASS_TOL)
        & (mass_j >= -ZERO_MASS_TOL)
        & (mass_k >= -ZERO_MASS_TOL)
    )
    tag = MeanCorr(spec.p, spec.rho)
    out: dict[tuple[int, ...], RayDensity] = {}
    for row, raw in zip(
        idx[keep], np.column_stack((mass_i, mass_j, mass_k))[keep]
    ):
        support = tuple(int(s) for s, x in zip(row, raw) if x > ZERO_MASS_TOL)
        if support in out:
            continue
        masses = [float(x) for x in raw if x > ZERO_MASS_TOL]
        total = math.fsum(masses)
        out[support] = RayDensity(
            d, support, tuple(x / total for x in masses), tag
        )
    return out


def enumerate_rays(spec: ClassSpec) -> list[RayDensity]:
    """All extremal rays of the mean-and-correlation class.

    Feasibility of the target second moment against the closed bounds of
    the mean class is checked first. The result merges the matching
    two-point mean-class rays, the point ray when both targets allow it,
    and every admissible triple, deduplicated by support set and sorted
    lexicographically. Complexity is O(d^3) in the triple sweep.
    """
    _require_corr(spec, "enumerate_rays")
    mu2 = spec.pair_moment_target
    mean_bounds = rays_mean.moment_bounds(spec, 2)
    if (
        mu2 < mean_bounds.lower - _FEASIBILITY_TOL
        or mu2 > mean_bounds.upper + _FEASIBILITY_TOL
    ):
        raise InfeasibleMoment(
            f"pair moment {mu2} outside attainable range "
            f"[{mean_bounds.lower}, {mean_bounds.upper}]"
        )
    d = spec.d
    m = spec.mean_count
    big_m = spec.second_moment_target
    match_tol = _MATCH_SCALE * max(1.0, float(d * d))
    tag = MeanCorr(spec.p, spec.rho)
    base = ClassSpec(d, spec.p)
    rays: dict[tuple[int, ...], RayDensity] = {}
    for j1 in range(base.max_lower_index + 1):
        for j2 in range(base.min_upper_index, d + 1):
            if abs((j1 + j2) * m - j1 * j2 - big_m) <= match_tol:
                flat = rays_mean.two_point_ray(base, j1, j2)
                rays[flat.support] = RayDensity(
                    d, flat.support, flat.masses, tag
                )
    if base.integer_mean and abs(m * m - big_m) <= match_tol:
        center = int(round(m))
        rays[(center,)] = RayDensity(d, (center,), (1.0,), tag)
    for support, ray in _scan_triples(spec).items():
        rays.setdefault(support, ray)
    return [rays[key] for key in sorted(rays)]


def membership(pmf: DefaultCountPmf, spec: ClassSpec) -> MembershipResult:
    """Test whether ``pmf`` satisfies both class constraints.

    Residuals are the dot products of the pmf with the centered
    constraint rows; membership requires the mean residual within
    ``1e-9 * d`` and the second-moment residual within ``1e-9 * d**2``.
    """
    _require_corr(spec, "membership")
    if pmf.d != spec.d:
        raise InvalidSpec(f"pmf has d={pmf.d}, spec has d={spec.d}")
    coeffs = CorrSystemCoeffs.from_spec(spec)
    r1 = float(np.dot(coeffs.alpha, pmf.probs))
    r2 = float(np.dot(coeffs.beta, pmf.probs))
    ok = (
        abs(r1) <= MEAN_RESIDUAL_SCALE * spec.d
        and abs(r2) <= SECOND_MOMENT_RESIDUAL_SCALE * spec.d**2
    )
    return MembershipResult(ok, r1, r2)
