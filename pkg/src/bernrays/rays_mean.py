"""Extremal rays of the default-count class with a fixed mean.

The admissible pmfs on ``{0, ..., d}`` with mean ``d*p`` form a convex
polytope whose extreme points all have at most two support points: one
strictly below the mean and one strictly above, with masses fixed by the
mean constraint, plus the degenerate point mass when ``d*p`` is itself
an integer. This module enumerates those rays, decomposes any admissible
pmf into a convex combination of them, and turns the enumeration into
sharp bounds on cross moments and on the pairwise correlation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence, Union

import numpy as np

from . import pmf as pmf_mod
from .errors import (
    IndexOutOfRange,
    InvalidSpec,
    LengthMismatch,
    MeanMismatch,
    NonIntegerMean,
    NotNormalized,
    OrderOutOfRange,
)
from .pmf import ClassSpec, DefaultCountPmf

# Masses this close to one another at a pairing step are exhausted together.
_RESIDUAL_EPS = 1e-15


@dataclass(frozen=True)
class MeanOnly:
    """Tag for rays of the class constrained by the mean alone."""

    p: float


@dataclass(frozen=True)
class MeanCorr:
    """Tag for rays of the class constrained by mean and correlation."""

    p: float
    rho: float


ClassTag = Union[MeanOnly, MeanCorr]


@dataclass(frozen=True)
class RayDensity:
    """An extremal pmf of an admissible class, stored sparsely.

    Parameters
    ----------
    d : int
        Dimension; support indices live in ``{0, ..., d}``.
    support : tuple of int
        One to three strictly increasing indices.
    masses : tuple of float
        Positive masses aligned with ``support``, summing to one.
    class_tag : MeanOnly or MeanCorr
        The class the ray is extremal for.
    """

    d: int
    support: tuple[int, ...]
    masses: tuple[float, ...]
    class_tag: ClassTag

    def __post_init__(self):
        sup = tuple(int(s) for s in self.support)
        mas = tuple(float(m) for m in self.masses)
        object.__setattr__(self, "support", sup)
        object.__setattr__(self, "masses", mas)
        if len(sup) != len(mas):
            raise LengthMismatch(
                f"{len(sup)} support points vs {len(mas)} masses"
            )
        if not 1 <= len(sup) <= 3:
            raise IndexOutOfRange(
                f"a ray carries 1 to 3 support points, got {len(sup)}"
            )
        if sup[0] < 0 or sup[-1] > self.d:
            raise IndexOutOfRange(f"support {sup} escapes 0..{self.d}")
        if any(a >= b for a, b in zip(sup, sup[1:])):
            raise IndexOutOfRange(f"support {sup} is not strictly increasing")
        if min(mas) <= 0.0:
            raise NotNormalized(f"ray masses must be positive, got {mas}")
        if abs(math.fsum(mas) - 1.0) > 1e-12:
            raise NotNormalized(f"ray masses sum to {math.fsum(mas)}")
        target = self.d * self.class_tag.p
        got = math.fsum(s * m for s, m in zip(sup, mas))
        if abs(got - target) > 1e-10 * self.d:
            raise MeanMismatch(f"ray mean {got} differs from target {target}")
        if isinstance(self.class_tag, MeanCorr):
            spec = ClassSpec(self.d, self.class_tag.p, self.class_tag.rho)
            got2 = math.fsum(s * s * m for s, m in zip(sup, mas))
            if abs(got2 - spec.second_moment_target) > 1e-9 * self.d**2:
                raise MeanMismatch(
                    f"ray second moment {got2} differs from target "
                    f"{spec.second_moment_target}"
                )

    def to_pmf(self) -> DefaultCountPmf:
        """Densify into a full default-count pmf."""
        probs = np.zeros(self.d + 1)
        for s, m in zip(self.support, self.masses):
            probs[s] = m
        return DefaultCountPmf(self.d, probs)


class MomentBounds(NamedTuple):
    """Sharp range of a cross moment over a class, with attaining rays."""

    lower: float
    upper: float
    argmin: RayDensity
    argmax: RayDensity


def _renormalized(masses: Sequence[float]) -> tuple[float, ...]:
    total = math.fsum(masses)
    return tuple(m / total for m in masses)


def _require_mean_only(spec: ClassSpec, op: str) -> None:
    if spec.rho is not None:
        raise InvalidSpec(
            f"{op} applies to the mean-constrained class; "
            "got a spec with a correlation target"
        )


def two_point_ray(spec: ClassSpec, j1: int, j2: int) -> RayDensity:
    """Extremal ray supported on ``{j1, j2}`` straddling the mean.

    Masses are ``(j2 - pd)/(j2 - j1)`` at ``j1`` and
    ``(pd - j1)/(j2 - j1)`` at ``j2``; both are positive exactly when
    ``j1 < pd < j2``.
    """
    j1, j2 = int(j1), int(j2)
    if not 0 <= j1 <= spec.max_lower_index:
        raise IndexOutOfRange(
            f"j1 must lie in 0..{spec.max_lower_index}, got {j1}"
        )
    if not spec.min_upper_index <= j2 <= spec.d:
        raise IndexOutOfRange(
            f"j2 must lie in {spec.min_upper_index}..{spec.d}, got {j2}"
        )
    pd = spec.mean_count
    gap = j2 - j1
    masses = _renormalized(((j2 - pd) / gap, (pd - j1) / gap))
    return RayDensity(spec.d, (j1, j2), masses, MeanOnly(spec.p))


def point_ray(spec: ClassSpec) -> RayDensity:
    """Point mass at the integer mean count."""
    if not spec.integer_mean:
        raise NonIntegerMean(
            f"mean count {spec.mean_count} is not an integer"
        )
    k = int(round(spec.mean_count))
    return RayDensity(spec.d, (k,), (1.0,), MeanOnly(spec.p))


def enumerate_rays(spec: ClassSpec) -> list[RayDensity]:
    """All extremal rays of the mean-constrained class.

    Two-point rays in lexicographic ``(j1, j2)`` order, the point ray
    (present iff ``d*p`` is an integer) last. The count is
    ``(j1M + 1) * (d - j2m + 1)`` plus one for the point ray, where
    ``j1M``/``j2m`` are the extreme support indices adjacent to the mean.
    """
    _require_mean_only(spec, "enumerate_rays")
    rays = [
        two_point_ray(spec, j1, j2)
        for j1 in range(spec.max_lower_index + 1)
        for j2 in range(spec.min_upper_index, spec.d + 1)
    ]
    if spec.integer_mean:
        rays.append(point_ray(spec))
    return rays


def decompose(
    pmf: DefaultCountPmf, spec: ClassSpec
) -> list[tuple[RayDensity, float]]:
    """Write an admissible pmf as a convex combination of extremal rays.

    Greedy residual pairing: the point-ray mass is peeled first when the
    mean is an integer, then the smallest below-mean index with residual
    mass is repeatedly paired with the smallest above-mean one, taking
    the largest weight that exhausts one of the two. Each step zeroes at
    least one residual entry, so at most ``d + 1`` terms are produced.

    Parameters
    ----------
    pmf : DefaultCountPmf
        Must have mean ``d*p`` within ``1e-9 * d``.
    spec : ClassSpec
        Mean-only class specification.

    Returns
    -------
    list of (RayDensity, float)
        Weights are positive and sum to one; mixing the rays with these
        weights reconstructs ``pmf`` entry by entry.
    """
    _require_mean_only(spec, "decompose")
    if pmf.d != spec.d:
        raise LengthMismatch(f"pmf has d={pmf.d}, spec has d={spec.d}")
    got = pmf_mod.mean(pmf)
    if abs(got - spec.mean_count) > pmf_mod.MEAN_RESIDUAL_SCALE * spec.d:
        raise MeanMismatch(
            f"pmf mean {got} differs from class mean {spec.mean_count}"
        )
    residual = [float(x) for x in pmf.probs]
    terms: list[tuple[RayDensity, float]] = []
    if spec.integer_mean:
        k = int(round(spec.mean_count))
        if residual[k] > 0.0:
            terms.append((point_ray(spec), residual[k]))
            residual[k] = 0.0
    lower = [j for j in range(spec.max_lower_index + 1) if residual[j] > 0.0]
    upper = [
        j for j in range(spec.min_upper_index, spec.d + 1) if residual[j] > 0.0
    ]
    li = ui = 0
    while li < len(lower) and ui < len(upper):
        j1, j2 = lower[li], upper[ui]
        ray = two_point_ray(spec, j1, j2)
        m1, m2 = ray.masses
        lam1 = residual[j1] / m1
        lam2 = residual[j2] / m2
        lam = min(lam1, lam2)
        terms.append((ray, lam))
        if lam1 <= lam2:
            residual[j1] = 0.0
            residual[j2] = max(0.0, residual[j2] - lam * m2)
            li += 1
            if residual[j2] <= _RESIDUAL_EPS:
                residual[j2] = 0.0
                ui += 1
        else:
            residual[j2] = 0.0
            residual[j1] = max(0.0, residual[j1] - lam * m1)
            ui += 1
            if residual[j1] <= _RESIDUAL_EPS:
                residual[j1] = 0.0
                li += 1
    return terms


def _falling_ratio(support: np.ndarray, d: int, order: int) -> np.ndarray:
    """``(s)_order / (d)_order`` per support value, as nested ratios."""
    out = np.ones(support.shape)
    s = support.astype(float)
    for t in range(order):
        out *= (s - t) / (d - t)
    return np.maximum(out, 0.0)


def moment_bounds(spec: ClassSpec, order: int) -> MomentBounds:
    """Sharp bounds on the order-``order`` cross moment over the class.

    Orders 1 and 2 use the closed forms (the order-2 minimum is attained
    by the two-point ray hugging the mean, or by the point ray at an
    integer mean; the maximum by the ray on ``{0, d}``). Higher orders
    scan the full enumeration. Any correlation target on ``spec`` is
    ignored: the bounds describe the mean-constrained class.
    """
    if not 1 <= order <= spec.d:
        raise OrderOutOfRange(f"order must lie in 1..{spec.d}, got {order}")
    base = ClassSpec(spec.d, spec.p)
    hull_ray = two_point_ray(base, 0, base.d)
    if order == 1:
        return MomentBounds(base.p, base.p, hull_ray, hull_ray)
    if order == 2:
        d, pd = base.d, base.mean_count
        if base.integer_mean:
            lower = base.p * (pd - 1.0) / (d - 1.0)
            argmin = point_ray(base)
        else:
            j = base.max_lower_index
            lower = (-j * (j + 1.0) + 2.0 * j * pd) / (d * (d - 1.0))
            argmin = two_point_ray(base, j, j + 1)
        return MomentBounds(lower, base.p, argmin, hull_ray)
    rays = enumerate_rays(base)
    best_lo = best_hi = None
    lo = math.inf
    hi = -math.inf
    for ray in rays:
        ratio = _falling_ratio(np.array(ray.support), base.d, order)
        value = float(np.dot(ratio, ray.masses))
        if value < lo or (value == lo and ray.support < best_lo.support):
            lo, best_lo = value, ray
        if value > hi or (value == hi and ray.support < best_hi.support):
            hi, best_hi = value, ray
    return MomentBounds(lo, hi, best_lo, best_hi)


def correlation_bounds(spec: ClassSpec) -> tuple[float, float]:
    """Sharp correlation range of the mean-constrained class.

    The maximum is 1 (comonotonic margins are always admissible); the
    minimum maps the order-2 moment minimum through
    ``rho = (mu2 - p^2) / (p(1-p))``.
    """
    mu2_low = moment_bounds(spec, 2).lower
    q = 1.0 - spec.p
    rho_min = (mu2_low - spec.p * spec.p) / (spec.p * q)
    return max(-1.0, rho_min), 1.0
